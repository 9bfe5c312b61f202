"""Singularity sets and closed families of them.

A singularity set is a concrete subset of a box-union domain: nothing,
finitely many points, the zero set of a smooth expression, an
increasing countable union of those, or a dense enumerated point set
truncated at a resolution cap.  Families bundle sets with two closure
properties: every member has dense complement, and any two members sit
inside a common member (exposed as :func:`union_join`).

Topological predicates are not decidable in general, so nowhere
density is either grid-verified (no cell on which sigma vanishes
identically) or trusted via an analytic flag set by constructors that
know better (finite sets, nontrivial polynomial zero sets).

Immutable values throughout; grid checks share no state across cells.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .domains import Box, OpenSet, Point
from .expr import (SmoothExpr, ZERO, add, const, coord, eval_with_certificate,
                   evaluate, from_sexpr, is_structural_zero, mul, pow_,
                   to_sexpr)

_ZERO_TOL = 1e-12

# deterministic in-cell offsets; the later ones are irrational so that
# enumerated rational sets always leave a sample free
_CELL_OFFSETS = (Fraction(1, 2), 0.7071067811865476, 0.41421356237309515,
                 0.6180339887498949, 0.3183098861837907, 0.8660254037844386,
                 0.2360679774997897, 0.9102392266268373)


class SingularityError(ValueError):
    pass


def _point_key(coords) -> Tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coords)


class SingularSet:
    """Base class; subclasses are immutable value objects."""

    kind = "abstract"

    def __init__(self, domain: OpenSet):
        self.domain = domain

    # membership of a concrete point
    def contains(self, x: Point) -> bool:
        raise NotImplementedError

    # does the set meet the closed sup-ball of radius delta around x?
    def meets_ball(self, x: Point, delta: float) -> bool:
        raise NotImplementedError

    def restrict(self, V: OpenSet) -> "SingularSet":
        raise NotImplementedError

    @property
    def is_nowhere_dense(self) -> bool:
        raise NotImplementedError

    def pieces(self) -> tuple:
        return (self,)

    def __eq__(self, other):
        return (type(self) is type(other)
                and self._payload() == other._payload()
                and self.domain == other.domain)

    def __hash__(self):
        return hash((self.kind, self._payload(), self.domain))

    def _payload(self):
        return ()

    def __repr__(self):
        return f"{type(self).__name__}({self._payload()!r})"


class EmptySet(SingularSet):
    kind = "empty"

    def contains(self, x):
        return False

    def meets_ball(self, x, delta):
        return False

    def restrict(self, V):
        return EmptySet(V)

    @property
    def is_nowhere_dense(self):
        return True

    def to_json(self):
        return {"kind": "empty"}


class FinitePoints(SingularSet):
    kind = "finite_points"

    def __init__(self, points, domain: OpenSet):
        super().__init__(domain)
        pts = sorted({_point_key(p) for p in points})
        for p in pts:
            if len(p) != domain.dimension:
                raise SingularityError("point dimension mismatch")
        self.points = tuple(pts)
        self.fpoints = tuple(tuple(float(c) for c in p) for p in pts)

    def contains(self, x):
        xt = tuple(float(c) for c in x)
        return xt in self.fpoints

    def meets_ball(self, x, delta):
        for p in self.fpoints:
            if all(abs(pc - xc) <= delta for pc, xc in zip(p, x)):
                return True
        return False

    def restrict(self, V):
        kept = [p for p, fp in zip(self.points, self.fpoints)
                if V.contains(fp)]
        if not kept:
            return EmptySet(V)
        return FinitePoints(kept, V)

    @property
    def is_nowhere_dense(self):
        return True

    def _payload(self):
        return self.points

    def to_json(self):
        return {"kind": "finite_points",
                "points": [[str(c) for c in p] for p in self.points]}

    def zero_polynomial(self) -> SmoothExpr:
        """A smooth expression vanishing exactly on the points."""
        factors = []
        for p in self.points:
            if len(p) == 1:
                factors.append(add(coord(0), const(-p[0])))
            else:
                factors.append(add(*(pow_(add(coord(a), const(-c)), 2)
                                     for a, c in enumerate(p))))
        return mul(*factors)


class ZeroSet(SingularSet):
    """Zero set of a smooth expression, intersected with the domain."""

    kind = "zero_set"

    def __init__(self, sigma: SmoothExpr, domain: OpenSet,
                 nowhere_dense: Optional[bool] = None,
                 grid_resolution: int = 16):
        super().__init__(domain)
        if is_structural_zero(sigma):
            raise SingularityError(
                "sigma is identically zero: the zero set is the whole domain")
        self.sigma = sigma
        if nowhere_dense is None:
            nowhere_dense = self._verify_nowhere_dense(grid_resolution)
        self._nd = bool(nowhere_dense)

    def _verify_nowhere_dense(self, res: int) -> bool:
        # no grid cell on which sigma is identically (numerically) zero
        for cell, _mid in self.domain.cells(res):
            seen_nonzero = False
            for off in _CELL_OFFSETS[:4]:
                x = tuple(float(lo + (hi - lo) * Fraction(off)
                                if isinstance(off, Fraction)
                                else lo + (hi - lo) * off)
                          for lo, hi in cell.intervals)
                if abs(evaluate(self.sigma, x)) > _ZERO_TOL:
                    seen_nonzero = True
                    break
            if not seen_nonzero:
                return False
        return True

    def contains(self, x):
        if not self.domain.contains(x):
            return False
        v, hard = eval_with_certificate(self.sigma, x)
        return hard or abs(v) <= _ZERO_TOL

    def meets_ball(self, x, delta):
        # sampled sign-change / small-value test on the ball
        lo = [c - delta for c in x]
        hi = [c + delta for c in x]
        samples = itertools.product(*[(a, (a + b) / 2, b)
                                      for a, b in zip(lo, hi)])
        signs = set()
        for s in samples:
            v = evaluate(self.sigma, s)
            if abs(v) <= _ZERO_TOL:
                return True
            signs.add(v > 0)
        return len(signs) > 1

    def restrict(self, V):
        return ZeroSet(self.sigma, V, nowhere_dense=self._nd)

    @property
    def is_nowhere_dense(self):
        return self._nd

    def _payload(self):
        return (self.sigma, self._nd)

    def to_json(self):
        return {"kind": "zero_set", "sigma": to_sexpr(self.sigma),
                "nowhere_dense": self._nd}


class CountableUnion(SingularSet):
    """Increasing union: stage l is the union of the first l+1 pieces
    (non-increasing inputs are repaired by that prefix reading)."""

    kind = "countable_union"

    def __init__(self, parts: Sequence[SingularSet], domain: OpenSet):
        super().__init__(domain)
        flat = []
        for p in parts:
            if isinstance(p, EmptySet):
                continue
            if isinstance(p, CountableUnion):
                flat.extend(p.parts)
            else:
                flat.append(p)
        if not flat:
            raise SingularityError("countable union needs at least one part")
        self.parts = tuple(flat)

    def stage(self, l: int) -> Tuple[SingularSet, ...]:
        return self.parts[:min(l, len(self.parts) - 1) + 1]

    def contains(self, x):
        return any(p.contains(x) for p in self.parts)

    def meets_ball(self, x, delta):
        return any(p.meets_ball(x, delta) for p in self.parts)

    def restrict(self, V):
        kept = [p.restrict(V) for p in self.parts]
        kept = [p for p in kept if not isinstance(p, EmptySet)]
        if not kept:
            return EmptySet(V)
        return CountableUnion(kept, V)

    @property
    def is_nowhere_dense(self):
        # a finite union of closed nowhere dense parts is closed and
        # nowhere dense; the countable reading is only used by the
        # Baire-style family
        return all(p.is_nowhere_dense for p in self.parts)

    def pieces(self):
        return self.parts

    def _payload(self):
        return self.parts

    def to_json(self):
        return {"kind": "countable_union",
                "parts": [p.to_json() for p in self.parts]}


class DenseEnumerated(SingularSet):
    """Finite truncation of a dense enumerated point set (all the
    operations used here only ever consult finitely many points)."""

    kind = "dense_enumerated"

    def __init__(self, points, domain: OpenSet, cap: int):
        super().__init__(domain)
        self.cap = cap
        pts = [_point_key(p) for p in points][:cap] if cap else \
            [_point_key(p) for p in points]
        self.points = tuple(pts)
        self.fpoints = frozenset(tuple(float(c) for c in p) for p in pts)

    def contains(self, x):
        return tuple(float(c) for c in x) in self.fpoints

    def meets_ball(self, x, delta):
        return any(all(abs(pc - xc) <= delta for pc, xc in zip(p, x))
                   for p in self.fpoints)

    def restrict(self, V):
        kept = [p for p in self.points
                if V.contains(tuple(float(c) for c in p))]
        if not kept:
            return EmptySet(V)
        return DenseEnumerated(kept, V, self.cap)

    @property
    def is_nowhere_dense(self):
        return False

    def _payload(self):
        return (self.points, self.cap)

    def to_json(self):
        return {"kind": "dense_enumerated", "cap": self.cap,
                "points": [[str(c) for c in p] for p in self.points]}


def singular_set_from_json(data, domain: OpenSet) -> SingularSet:
    kind = data["kind"]
    if kind == "empty":
        return EmptySet(domain)
    if kind == "finite_points":
        return FinitePoints([[Fraction(c) for c in p]
                             for p in data["points"]], domain)
    if kind == "zero_set":
        return ZeroSet(from_sexpr(data["sigma"]), domain,
                       nowhere_dense=data.get("nowhere_dense"))
    if kind == "countable_union":
        return CountableUnion([singular_set_from_json(p, domain)
                               for p in data["parts"]], domain)
    if kind == "dense_enumerated":
        return DenseEnumerated([[Fraction(c) for c in p]
                                for p in data["points"]], domain,
                               data.get("cap", 0))
    raise SingularityError(f"unknown singular set kind {kind!r}")


def rationals_in_unit_interval(max_denominator: int) -> Tuple[Fraction, ...]:
    """Fixed enumeration of the rationals in (0,1) with bounded
    denominator: ordered by denominator, then numerator, reduced."""
    out = []
    seen = set()
    for q in range(2, max_denominator + 1):
        for p in range(1, q):
            f = Fraction(p, q)
            if f not in seen:
                seen.add(f)
                out.append(f)
    return tuple(out)


# ---------------------------------------------------------------------------
# density of the complement


@dataclass(frozen=True)
class DensityReport:
    ok: bool
    witnesses: tuple  # one exterior sample point per cell when ok
    failing_cell: Optional[tuple] = None

    def to_json(self):
        return {"ok": self.ok,
                "witnesses": [list(w) for w in self.witnesses],
                "failing_cell": None if self.failing_cell is None
                else [list(map(float, iv)) for iv in self.failing_cell]}


def exterior_samples(sigma_set: SingularSet, domain: OpenSet,
                     grid_resolution: int):
    """One sample point outside the set per grid cell: the midpoint
    when it is free, otherwise the first free deterministic offset
    (irrational offsets, so enumerated rational sets always yield one).
    Cells with no free sample are skipped."""
    pts = []
    seen = set()
    for cell, mid in domain.cells(grid_resolution):
        chosen = None
        if not sigma_set.contains(mid):
            chosen = mid
        else:
            for off in _CELL_OFFSETS:
                x = tuple(float(lo) + float(hi - lo) * float(off)
                          for lo, hi in cell.intervals)
                if not sigma_set.contains(x):
                    chosen = x
                    break
        if chosen is not None and chosen not in seen:
            seen.add(chosen)
            pts.append(chosen)
    return tuple(sorted(pts))


def complement_dense(sigma_set: SingularSet,
                     grid_resolution: int) -> DensityReport:
    """Check that every grid cell of the domain contains a sample point
    outside the set.  Returns per-cell exterior witnesses, or the first
    cell all of whose samples lie inside (which only degenerate zero
    sets produce)."""
    if grid_resolution < 2:
        raise SingularityError("resolution must be at least 2 per axis")
    witnesses = []
    for cell, _mid in sigma_set.domain.cells(grid_resolution):
        found = None
        for off in _CELL_OFFSETS:
            x = tuple(float(lo) + float(hi - lo) * float(off)
                      for lo, hi in cell.intervals)
            if not sigma_set.contains(x):
                found = x
                break
        if found is None:
            return DensityReport(False, tuple(witnesses),
                                 failing_cell=tuple(cell.intervals))
        witnesses.append(found)
    return DensityReport(True, tuple(witnesses))


# ---------------------------------------------------------------------------
# families


class FamilyError(ValueError):
    pass


_LABELS = ("nd", "baire_delta", "custom")


class SingularityFamily:
    """A family of singularity sets, closed under pairwise union-join,
    every member with dense complement.

    ``nd``           closed nowhere dense sets;
    ``baire_delta``  countable increasing unions of those;
    ``custom``       exactly the listed generators and their joins.
    """

    def __init__(self, label: str, generators: Sequence[SingularSet],
                 domain: OpenSet, grid_resolution: int = 8,
                 verify: bool = True):
        if label not in _LABELS:
            raise FamilyError(f"unknown family label {label!r}")
        self.label = label
        self.domain = domain
        gens = tuple(generators)
        self.generators = gens
        for g in gens:
            if g.domain != domain:
                raise FamilyError("generator domain mismatch")
            if verify and not self.accepts(g):
                raise FamilyError(f"{g!r} is not a member of family {label}")
            if verify and not isinstance(g, EmptySet):
                rep = complement_dense(g, grid_resolution)
                if not rep.ok:
                    raise FamilyError(
                        f"generator {g!r} has non-dense complement")

    def accepts(self, s: SingularSet) -> bool:
        if isinstance(s, EmptySet):
            return True
        if self.label == "nd":
            return s.is_nowhere_dense and not isinstance(s, DenseEnumerated)
        if self.label == "baire_delta":
            if isinstance(s, CountableUnion):
                return all(p.is_nowhere_dense for p in s.parts)
            return s.is_nowhere_dense or isinstance(s, DenseEnumerated)
        return any(s == g for g in self.generators)

    def union_join(self, a: SingularSet, b: SingularSet) -> SingularSet:
        """A member containing a ∪ b."""
        if isinstance(a, EmptySet):
            return b
        if isinstance(b, EmptySet):
            return a
        if a == b:
            return a
        out = self._raw_join(a, b)
        if not self.accepts(out):
            raise FamilyError(
                f"join of {a!r} and {b!r} is not representable in this family")
        return out

    def _raw_join(self, a, b):
        if isinstance(a, FinitePoints) and isinstance(b, FinitePoints):
            return FinitePoints(a.points + b.points, self.domain)
        if self.label == "baire_delta" or isinstance(a, (CountableUnion,
                                                         DenseEnumerated)) \
                or isinstance(b, (CountableUnion, DenseEnumerated)):
            return CountableUnion(tuple(a.pieces()) + tuple(b.pieces()),
                                  self.domain)
        # nd / custom: keep the result a closed set
        ax = a.zero_polynomial() if isinstance(a, FinitePoints) else a.sigma
        bx = b.zero_polynomial() if isinstance(b, FinitePoints) else b.sigma
        nd = a.is_nowhere_dense and b.is_nowhere_dense
        return ZeroSet(mul(ax, bx), self.domain, nowhere_dense=nd)

    def restrict(self, V: OpenSet, grid_resolution: int = 8) \
            -> "SingularityFamily":
        if V.dimension != self.domain.dimension \
                or not self.domain.contains_set(V):
            raise FamilyError("restriction target must sit inside the domain")
        gens = [g.restrict(V) for g in self.generators]
        return SingularityFamily(self.label, gens, V,
                                 grid_resolution=grid_resolution)

    def __eq__(self, other):
        return (isinstance(other, SingularityFamily)
                and self.label == other.label
                and self.generators == other.generators
                and self.domain == other.domain)

    def __hash__(self):
        return hash((self.label, self.generators, self.domain))

    def __repr__(self):
        return f"SingularityFamily({self.label}, {len(self.generators)} gens)"

    def to_json(self):
        return {"label": self.label,
                "generators": [g.to_json() for g in self.generators],
                "domain": self.domain.to_json()}


def restrict_family(S: SingularityFamily, V: OpenSet) -> SingularityFamily:
    return S.restrict(V)


def union_join(S: SingularityFamily, a: SingularSet,
               b: SingularSet) -> SingularSet:
    return S.union_join(a, b)


# ---------------------------------------------------------------------------
# locally finitely additive predicate


@dataclass(frozen=True)
class LFAWitness:
    point: Point
    delta: float
    indices: tuple

    def to_json(self):
        return {"point": list(self.point), "delta": self.delta,
                "indices": list(self.indices)}


@dataclass(frozen=True)
class LFAReport:
    passed: bool
    witnesses: tuple
    inconclusive_points: tuple
    union_member: Optional[SingularSet]

    def to_json(self):
        return {"passed": self.passed,
                "witnesses": [w.to_json() for w in self.witnesses],
                "inconclusive_points": [list(p)
                                        for p in self.inconclusive_points],
                "union_member": None if self.union_member is None
                else self.union_member.to_json()}


def locally_finitely_additive(S: SingularityFamily,
                              sigmas: Sequence[SingularSet],
                              V: OpenSet, grid_resolution: int,
                              accumulation_points: Sequence[Point] = (),
                              max_halvings: int = 40) -> LFAReport:
    """For each grid point of V, find a radius whose neighbourhood meets
    only finitely many of the sigmas.

    The input list is finite, so the finiteness proper is automatic;
    what the radius search guards against are declared accumulation
    points of the untruncated family: the radius is shrunk until the
    ball is free of them, and a point where that never happens (the
    accumulation point itself) is reported inconclusive rather than
    passed.  On success the union is materialised as a member of S|_V.
    """
    acc = [tuple(float(c) for c in p) for p in accumulation_points]
    witnesses = []
    inconclusive = []
    for x in V.sample_grid(grid_resolution):
        delta = 0.5
        ok = False
        for _ in range(max_halvings):
            blocked = any(all(abs(ac - xc) <= delta
                              for ac, xc in zip(a, x)) for a in acc)
            if not blocked:
                ok = True
                break
            delta /= 2
        if not ok:
            inconclusive.append(x)
            continue
        idx = tuple(i for i, s in enumerate(sigmas) if s.meets_ball(x, delta))
        witnesses.append(LFAWitness(x, delta, idx))
    if inconclusive:
        return LFAReport(False, tuple(witnesses), tuple(inconclusive), None)
    member = CountableUnion(list(sigmas), S.domain).restrict(V)
    if not isinstance(member, EmptySet) and not S.restrict(V).accepts(member):
        raise FamilyError("assembled union is not a member of the "
                          "restricted family")
    return LFAReport(True, tuple(witnesses), (), member)
