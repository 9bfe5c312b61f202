"""Indexed sequences of smooth functions, asymptotically vanishing
ideals with machine-checkable membership certificates, and the quotient
algebras of generalized functions built from them.

Membership in the ideal is the per-point asymptotic vanishing
condition: at every point outside the singularity set there is an index
beyond which every term and all its partial derivatives are zero there.
That quantifies over all larger indices and all derivative orders, so
no finite procedure decides it; the checker is semidecidable by design
and returns one of three outcomes:

* ``verified``      every sampled exterior point has a witness index at
                    which all probed larger indices and derivatives up
                    to the cap evaluate to structural zeros (preferred)
                    or values below 1e-12;
* ``refuted``       some sampled point defeats every probed witness
                    with a value above 1e-9 (carried in the result);
* ``inconclusive``  values fell between the two tolerances.

Constructed members carry analytic witness hints, so their
certificates come out fully structural.  GenFunction values are
immutable; term generation is memoised per sequence, which is the only
observable cache, and concurrent readers are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

from .bump import shrinking_plateau
from .domains import MultiIndex, OpenSet, Point, multiindices
from .expr import (SmoothExpr, ZERO, add, all_derivatives_hard_zero,
                   combine_fractions, const, derive1, eval_with_certificate,
                   expand, is_structural_zero, mul, size, to_sexpr)
from .orders import NAT, NAT_PAIR, CofinalEmbedding, IndexOrder
from .singular import (CountableUnion, EmptySet, FinitePoints, SingularSet,
                       SingularityFamily, ZeroSet, complement_dense,
                       exterior_samples)

_EXPAND_SIZE_LIMIT = 600


class IdealMismatchError(ValueError):
    """Operating on generalized functions over different ideals."""


class FoamError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipConfig:
    """Caps and tolerances for certificate checking.

    Structural zeros are preferred; |value| <= hard_tol counts as a
    numeric zero; values in (hard_tol, refute_tol] are inconclusive;
    anything above refute_tol refutes the probed witness.
    """

    p_cap: int = 4
    probe_cap: int = 8
    grid_resolution: int = 32
    hard_tol: float = 1e-12
    refute_tol: float = 1e-9
    join_cap: int = 4

    def validate(self):
        if self.p_cap < 0 or self.probe_cap < 1 or self.grid_resolution < 1:
            raise FoamError("configuration caps must be positive")
        return self


DEFAULT_CONFIG = MembershipConfig()


# ---------------------------------------------------------------------------
# sequences


class FoamSequence:
    """A lazily generated map index -> smooth expression on a domain.

    ``witness_hint`` (point -> index) and ``sigma_hints`` (candidate
    singularity sets) are optional search accelerators attached by the
    constructions that know them; verification never trusts them
    blindly.
    """

    __slots__ = ("order", "domain", "_term_fn", "descriptor",
                 "witness_hint", "sigma_hints", "notes", "_memo")

    def __init__(self, order: IndexOrder, domain: OpenSet,
                 term_fn: Callable, descriptor: Optional[dict] = None,
                 witness_hint: Optional[Callable] = None,
                 sigma_hints: Tuple[SingularSet, ...] = (),
                 notes: Tuple[str, ...] = ()):
        self.order = order
        self.domain = domain
        self._term_fn = term_fn
        self.descriptor = descriptor or {"generator": "anonymous"}
        self.witness_hint = witness_hint
        self.sigma_hints = tuple(sigma_hints)
        self.notes = tuple(notes)
        self._memo = {}

    def term(self, idx) -> SmoothExpr:
        self.order.validate(idx)
        t = self._memo.get(idx)
        if t is None:
            t = self._term_fn(idx)
            if t.max_axis >= self.domain.dimension:
                raise FoamError(
                    f"term at {idx} uses axis {t.max_axis} outside the "
                    f"{self.domain.dimension}-dimensional domain")
            self._memo[idx] = t
        return t

    # -- termwise algebra -------------------------------------------------
    def _combine_hints(self, other):
        if self.witness_hint and other.witness_hint:
            join = self.order.join
            a, b = self.witness_hint, other.witness_hint
            return lambda x: join(a(x), b(x))
        return self.witness_hint or other.witness_hint

    def __add__(self, other: "FoamSequence") -> "FoamSequence":
        self._check_compat(other)
        return FoamSequence(
            self.order, self.domain,
            lambda i: add(self.term(i), other.term(i)),
            descriptor={"generator": "sum",
                        "of": [self.descriptor, other.descriptor]},
            witness_hint=self._combine_hints(other),
            sigma_hints=self.sigma_hints + other.sigma_hints)

    def __mul__(self, other: "FoamSequence") -> "FoamSequence":
        self._check_compat(other)
        return FoamSequence(
            self.order, self.domain,
            lambda i: mul(self.term(i), other.term(i)),
            descriptor={"generator": "product",
                        "of": [self.descriptor, other.descriptor]},
            witness_hint=self._combine_hints(other),
            sigma_hints=self.sigma_hints + other.sigma_hints)

    def scale(self, c) -> "FoamSequence":
        return FoamSequence(
            self.order, self.domain, lambda i: mul(const(c), self.term(i)),
            descriptor={"generator": "scale", "by": float(c),
                        "of": self.descriptor},
            witness_hint=self.witness_hint, sigma_hints=self.sigma_hints)

    def __sub__(self, other: "FoamSequence") -> "FoamSequence":
        return self + other.scale(-1)

    def dp(self, p: MultiIndex) -> "FoamSequence":
        p = tuple(p)
        return FoamSequence(
            self.order, self.domain,
            lambda i: _derive_multi(self.term(i), p),
            descriptor={"generator": "derivative", "p": list(p),
                        "of": self.descriptor},
            witness_hint=self.witness_hint, sigma_hints=self.sigma_hints)

    def with_domain(self, V: OpenSet) -> "FoamSequence":
        return FoamSequence(self.order, V, self._term_fn,
                            descriptor=self.descriptor,
                            witness_hint=self.witness_hint,
                            sigma_hints=tuple(s.restrict(V)
                                              for s in self.sigma_hints),
                            notes=self.notes)

    def _check_compat(self, other):
        if self.order != other.order:
            raise FoamError("sequences over different index orders")
        if self.domain != other.domain:
            raise FoamError("sequences over different domains")


def _derive_multi(e: SmoothExpr, p: MultiIndex) -> SmoothExpr:
    for axis, n in enumerate(p):
        for _ in range(n):
            e = derive1(e, axis)
    return e


def diagonal(psi: SmoothExpr, order: IndexOrder,
             domain: OpenSet) -> FoamSequence:
    """The constant sequence at a smooth function."""
    return FoamSequence(order, domain, lambda i: psi,
                        descriptor={"generator": "diagonal",
                                    "psi": to_sexpr(psi)},
                        witness_hint=lambda x: order.least())


def zero_sequence(order: IndexOrder, domain: OpenSet) -> FoamSequence:
    return FoamSequence(order, domain, lambda i: ZERO,
                        descriptor={"generator": "zero"},
                        witness_hint=lambda x: order.least())


# ---------------------------------------------------------------------------
# ideals


class IdealDescriptor:
    """Either a single singularity set or a whole family, together with
    the index order and domain.  For a family the ideal is the union of
    the per-set ideals, so membership may be certified against any
    member reachable from the generators by finitely many joins."""

    __slots__ = ("mode", "sigma", "family", "order", "domain")

    def __init__(self, order: IndexOrder, domain: OpenSet,
                 sigma: Optional[SingularSet] = None,
                 family: Optional[SingularityFamily] = None,
                 verify: bool = True, grid_resolution: int = 8):
        if (sigma is None) == (family is None):
            raise FoamError("provide exactly one of sigma or family")
        self.mode = "single" if sigma is not None else "family"
        self.sigma = sigma
        self.family = family
        self.order = order
        self.domain = domain
        if sigma is not None:
            if sigma.domain != domain:
                raise FoamError("sigma lives on a different domain")
            if verify and not isinstance(sigma, EmptySet):
                rep = complement_dense(sigma, grid_resolution)
                if not rep.ok:
                    raise FoamError(
                        "singularity set has non-dense complement")
        else:
            if family.domain != domain:
                raise FoamError("family lives on a different domain")

    def candidates(self, hints: Sequence[SingularSet] = (),
                   join_cap: int = 4):
        """Deterministic candidate singularity sets for certification."""
        if self.mode == "single":
            return (self.sigma,)
        out = []
        seen = set()

        def push(s):
            if s is not None and s not in seen:
                seen.add(s)
                out.append(s)

        for h in hints:
            h = h if h.domain == self.domain else h.restrict(self.domain)
            if self.family.accepts(h):
                push(h)
        for g in self.family.generators:
            push(g)
        push(EmptySet(self.domain))  # member of every family
        base = list(out)
        joins = 0
        for i, a in enumerate(base):
            for b in base[i + 1:]:
                if joins >= join_cap:
                    break
                try:
                    push(self.family.union_join(a, b))
                    joins += 1
                except Exception:
                    continue
        return tuple(out)

    def restrict(self, V: OpenSet) -> "IdealDescriptor":
        if self.mode == "single":
            return IdealDescriptor(self.order, V, sigma=self.sigma.restrict(V),
                                   verify=False)
        return IdealDescriptor(self.order, V, family=self.family.restrict(V))

    def __eq__(self, other):
        return (isinstance(other, IdealDescriptor)
                and self.mode == other.mode and self.order == other.order
                and self.domain == other.domain and self.sigma == other.sigma
                and self.family == other.family)

    def __hash__(self):
        return hash((self.mode, self.order, self.domain, self.sigma,
                     self.family))

    def to_json(self):
        body = {"order": self.order.kind, "domain": self.domain.to_json()}
        if self.mode == "single":
            body["sigma"] = self.sigma.to_json()
        else:
            body["family"] = self.family.to_json()
        return body


def single_ideal(sigma: SingularSet, order: IndexOrder = NAT,
                 **kw) -> IdealDescriptor:
    return IdealDescriptor(order, sigma.domain, sigma=sigma, **kw)


def family_ideal(family: SingularityFamily,
                 order: IndexOrder = NAT) -> IdealDescriptor:
    return IdealDescriptor(order, family.domain, family=family)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class VanishingCertificate:
    sigma: SingularSet
    points: Tuple[Point, ...]
    witnesses: tuple
    p_cap: int
    probes: int
    structural_zeros: int
    numeric_zeros: int
    max_numeric: float

    @property
    def all_structural(self) -> bool:
        return self.numeric_zeros == 0

    def to_json(self, order: IndexOrder):
        return {"sigma": self.sigma.to_json(),
                "sample_points": [list(p) for p in self.points],
                "witnesses": [order.element_to_json(w)
                              for w in self.witnesses],
                "P": self.p_cap, "probes": self.probes,
                "structural_zeros": self.structural_zeros,
                "numeric_zeros": self.numeric_zeros,
                "max_numeric": self.max_numeric,
                "status": "verified"}


@dataclass(frozen=True)
class ProbeFailure:
    witness: object
    index: object
    p: MultiIndex
    value: float


@dataclass(frozen=True)
class Refutation:
    sigma: SingularSet
    point: Point
    attempts: Tuple[ProbeFailure, ...]

    def to_json(self, order: IndexOrder):
        return {"sigma": self.sigma.to_json(), "point": list(self.point),
                "attempts": [{"witness": order.element_to_json(a.witness),
                              "index": order.element_to_json(a.index),
                              "p": list(a.p), "value": a.value}
                             for a in self.attempts],
                "status": "refuted"}


@dataclass(frozen=True)
class MembershipResult:
    status: str  # verified | refuted | inconclusive
    certificate: Optional[VanishingCertificate] = None
    refutation: Optional[Refutation] = None
    gray_points: Tuple[Point, ...] = ()

    @property
    def verified(self):
        return self.status == "verified"

    @property
    def refuted(self):
        return self.status == "refuted"

    def to_json(self, order: IndexOrder):
        if self.status == "verified":
            return self.certificate.to_json(order)
        if self.status == "refuted":
            return self.refutation.to_json(order)
        return {"status": "inconclusive",
                "gray_points": [list(p) for p in self.gray_points]}


class _DerivedTerms:
    """Per-check cache of D^p w_idx, derived incrementally."""

    def __init__(self, seq: FoamSequence, dim: int):
        self.seq = seq
        self.dim = dim
        self.cache = {}

    def get(self, idx, p: MultiIndex) -> SmoothExpr:
        key = (idx, p)
        e = self.cache.get(key)
        if e is not None:
            return e
        if all(n == 0 for n in p):
            e = self.seq.term(idx)
        else:
            axis = next(a for a, n in enumerate(p) if n > 0)
            parent = tuple(n - 1 if a == axis else n
                           for a, n in enumerate(p))
            e = derive1(self.get(idx, parent), axis)
        self.cache[key] = e
        return e


def check_membership(w: FoamSequence, d: IdealDescriptor,
                     cfg: MembershipConfig = DEFAULT_CONFIG) \
        -> MembershipResult:
    """Certify or refute asymptotic vanishing of ``w`` outside the
    ideal's singularity set (family mode: outside some member built
    from hints, generators and finitely many joins)."""
    cfg.validate()
    if w.order != d.order:
        raise FoamError("sequence and ideal use different index orders")
    if w.domain.dimension != d.domain.dimension or w.domain != d.domain:
        raise FoamError("sequence and ideal live on different domains")

    results = []
    for sigma in d.candidates(hints=w.sigma_hints, join_cap=cfg.join_cap):
        r = _check_against(w, sigma, cfg)
        if r.verified:
            return r
        results.append(r)
    for r in results:
        if r.status == "inconclusive":
            return r
    return results[0]


def _check_against(w: FoamSequence, sigma: SingularSet,
                   cfg: MembershipConfig) -> MembershipResult:
    dim = w.domain.dimension
    ps = multiindices(dim, cfg.p_cap)
    terms = _DerivedTerms(w, dim)
    order = w.order

    points = exterior_samples(sigma, w.domain, cfg.grid_resolution)

    witnesses = []
    structural = 0
    numeric = 0
    max_numeric = 0.0
    gray_points = []
    for x in points:
        cands = []
        if w.witness_hint is not None:
            try:
                h = w.witness_hint(x)
            except Exception:
                h = None
            if h is not None:
                cands.append(order.validate(h))
        for c in order.witness_candidates(cfg.probe_cap):
            if c not in cands:
                cands.append(c)

        attempts = []
        point_gray = False
        certified = None
        for w0 in cands:
            ok = True
            gray_here = False
            s_acc = n_acc = 0
            m_acc = 0.0
            seen = set()
            for mu in order.probes_from(w0, cfg.probe_cap):
                base = w.term(mu)
                # one-pass certificate covering every derivative order
                if all_derivatives_hard_zero(base, x):
                    s_acc += len(ps)
                    continue
                if id(base) in seen:
                    continue  # structurally identical term already probed
                seen.add(id(base))
                for p in ps:
                    e = terms.get(mu, p)
                    v, hard = eval_with_certificate(e, x)
                    if hard:
                        s_acc += 1
                        continue
                    av = abs(v)
                    if av <= cfg.hard_tol:
                        n_acc += 1
                        m_acc = max(m_acc, av)
                        continue
                    if av <= cfg.refute_tol:
                        gray_here = True
                        ok = False
                        break
                    attempts.append(ProbeFailure(w0, mu, p, v))
                    ok = False
                    break
                if not ok:
                    break
            if ok:
                certified = (w0, s_acc, n_acc, m_acc)
                break
            point_gray = point_gray or gray_here
        if certified is None:
            if point_gray:
                gray_points.append(x)
                continue
            return MembershipResult(
                "refuted",
                refutation=Refutation(sigma, x, tuple(attempts)))
        w0, s_acc, n_acc, m_acc = certified
        witnesses.append(w0)
        structural += s_acc
        numeric += n_acc
        max_numeric = max(max_numeric, m_acc)
    if gray_points:
        return MembershipResult("inconclusive",
                                gray_points=tuple(gray_points))
    cert = VanishingCertificate(
        sigma=sigma, points=tuple(points), witnesses=tuple(witnesses),
        p_cap=cfg.p_cap, probes=cfg.probe_cap,
        structural_zeros=structural, numeric_zeros=numeric,
        max_numeric=max_numeric)
    return MembershipResult("verified", certificate=cert)


def certificate_transfer(cert: VanishingCertificate,
                         larger: SingularSet) -> VanishingCertificate:
    """Monotonicity in the singularity set: a certificate against a
    smaller set works verbatim against a larger one; samples now inside
    the larger set simply drop out."""
    kept = [(x, w) for x, w in zip(cert.points, cert.witnesses)
            if not larger.contains(x)]
    return VanishingCertificate(
        sigma=larger, points=tuple(x for x, _ in kept),
        witnesses=tuple(w for _, w in kept), p_cap=cert.p_cap,
        probes=cert.probes, structural_zeros=cert.structural_zeros,
        numeric_zeros=cert.numeric_zeros, max_numeric=cert.max_numeric)


# ---------------------------------------------------------------------------
# generalized functions


class GenFunction:
    """An element of the quotient algebra, carried by a representative
    sequence modulo an asymptotically vanishing ideal."""

    __slots__ = ("rep", "ideal")

    def __init__(self, rep: FoamSequence, ideal: IdealDescriptor):
        if rep.order != ideal.order:
            raise IdealMismatchError("representative/ideal order mismatch")
        if rep.domain != ideal.domain:
            raise IdealMismatchError("representative/ideal domain mismatch")
        self.rep = rep
        self.ideal = ideal

    def _require_same_ideal(self, other: "GenFunction"):
        if self.ideal != other.ideal:
            raise IdealMismatchError(
                "operation across different ideals is undefined")

    def __add__(self, other):
        if isinstance(other, GenFunction):
            self._require_same_ideal(other)
            return GenFunction(self.rep + other.rep, self.ideal)
        return GenFunction(self.rep + diagonal(const(other), self.rep.order,
                                               self.rep.domain), self.ideal)

    def __mul__(self, other):
        if isinstance(other, GenFunction):
            self._require_same_ideal(other)
            return GenFunction(self.rep * other.rep, self.ideal)
        return GenFunction(self.rep.scale(other), self.ideal)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __sub__(self, other):
        if isinstance(other, GenFunction):
            self._require_same_ideal(other)
            return GenFunction(self.rep - other.rep, self.ideal)
        return self + (-other)

    def dp(self, p: MultiIndex) -> "GenFunction":
        """Termwise partial derivation; the ideal is stable under it."""
        p = tuple(p)
        if all(n == 0 for n in p):
            return self
        return GenFunction(self.rep.dp(p), self.ideal)


def embed_smooth(psi: SmoothExpr, d: IdealDescriptor) -> GenFunction:
    """The smooth-function embedding: psi as a constant sequence."""
    if psi.max_axis >= d.domain.dimension:
        raise FoamError("psi uses axes outside the domain")
    return GenFunction(diagonal(psi, d.order, d.domain), d)


def eq_mod_ideal(T: GenFunction, Tp: GenFunction,
                 cfg: MembershipConfig = DEFAULT_CONFIG,
                 sigma_hint: Optional[SingularSet] = None) \
        -> MembershipResult:
    """Quotient equality: certify the difference of representatives in
    the shared ideal.  Small difference terms are expanded first so
    polynomially-equal representatives cancel structurally."""
    T._require_same_ideal(Tp)
    diff = T.rep - Tp.rep
    folded = FoamSequence(
        diff.order, diff.domain,
        lambda i: _fold(diff.term(i)),
        descriptor={"generator": "difference"},
        witness_hint=diff.witness_hint,
        sigma_hints=diff.sigma_hints +
        ((sigma_hint,) if sigma_hint is not None else ()))
    return check_membership(folded, T.ideal, cfg)


def _fold(e: SmoothExpr) -> SmoothExpr:
    if size(e) <= _EXPAND_SIZE_LIMIT:
        e = expand(e)
    return combine_fractions(e)


# ---------------------------------------------------------------------------
# nontrivial ideal members


def nontrivial_nd(sigma: SmoothExpr, X: OpenSet,
                  nowhere_dense: Optional[bool] = None) -> FoamSequence:
    """The canonical nontrivial member of the ideal over the zero set
    of ``sigma``: term l is the shrinking plateau that is 1 on the zero
    set and vanishes identically wherever |sigma| >= 1/(l+1).

    Carries the analytic witness index ceil(1/|sigma(x)|) - 1, so
    membership certificates are fully structural.
    """
    if is_structural_zero(sigma):
        raise FoamError("sigma is identically zero; its zero set is the "
                        "whole domain and has no dense complement")
    zs = ZeroSet(sigma, X, nowhere_dense=nowhere_dense)
    if not zs.is_nowhere_dense:
        raise FoamError("the zero set must be nowhere dense "
                        "(flag it if known analytically)")

    def hint(x):
        v = abs(eval_with_certificate(sigma, x)[0])
        if v == 0.0:
            return 0
        h = max(0, math.ceil(1.0 / v) - 1)
        while (h + 1) * v < 1.0 + 1e-12:  # stay clear of the seam
            h += 1
        return h

    return FoamSequence(
        NAT, X, lambda l: shrinking_plateau(sigma, l),
        descriptor={"generator": "eq26", "sigma": to_sexpr(sigma)},
        witness_hint=hint, sigma_hints=(zs,))


def nontrivial_baire(sigmas: Sequence[SingularSet],
                     X: OpenSet) -> FoamSequence:
    """Nontrivial member over a countable increasing union of closed
    nowhere dense sets, indexed by pairs (l, k): term (l, k) is 1 on
    the l-th stage of the union and vanishes identically where the
    stage polynomial exceeds 1/(k+1) in magnitude.

    Inputs that are not increasing are repaired by reading stage l as
    the union of the first l+1 entries (recorded in ``notes``).
    """
    pieces = []
    notes = []
    for s in sigmas:
        if isinstance(s, (FinitePoints, ZeroSet)):
            pieces.append(s)
        else:
            raise FoamError(
                "stages must be finite point sets or zero sets")
        if s.domain != X:
            raise FoamError("stage domain mismatch")
    if not pieces:
        raise FoamError("need at least one stage")
    increasing = all(
        set(a.points).issubset(set(b.points))
        for a, b in zip(pieces, pieces[1:])
        if isinstance(a, FinitePoints) and isinstance(b, FinitePoints))
    if not increasing:
        notes.append("input stages were not increasing; "
                     "using prefix unions")

    # stage l of the union, deduplicated so the stage polynomial has
    # each root exactly once
    prefix = []
    acc_points: list = []
    acc_exprs: list = []
    for p in pieces:
        if isinstance(p, FinitePoints):
            for q in p.points:
                if q not in acc_points:
                    acc_points.append(q)
        elif p.sigma not in acc_exprs:
            acc_exprs.append(p.sigma)
        factors = list(acc_exprs)
        if acc_points:
            factors.append(FinitePoints(list(acc_points), X)
                           .zero_polynomial())
        prefix.append(mul(*factors))
    last = len(prefix) - 1

    union = CountableUnion(pieces, X)

    def stage_expr(l: int) -> SmoothExpr:
        return prefix[min(l, last)]

    def hint(x):
        k0 = 0
        for e in prefix:
            v = abs(eval_with_certificate(e, x)[0])
            if v == 0.0:
                return (0, 0)
            k = max(0, math.ceil(1.0 / v) - 1)
            while (k + 1) * v < 1.0 + 1e-12:
                k += 1
            k0 = max(k0, k)
        return (0, k0)

    return FoamSequence(
        NAT_PAIR, X,
        lambda lk: shrinking_plateau(stage_expr(lk[0]), lk[1]),
        descriptor={"generator": "eq29",
                    "stages": [p.to_json() for p in pieces]},
        witness_hint=hint, sigma_hints=(union,), notes=tuple(notes))


# ---------------------------------------------------------------------------
# morphisms


def _sigma_contained(a: SingularSet, b: SingularSet) -> bool:
    """Sufficient (not complete) containment test between concrete
    singularity sets."""
    if isinstance(a, EmptySet) or a == b:
        return True
    if isinstance(b, CountableUnion):
        return all(any(_sigma_contained(p, part) for part in b.parts)
                   for p in a.pieces())
    if isinstance(a, (FinitePoints,)) and isinstance(b, FinitePoints):
        return set(a.points).issubset(set(b.points))
    if isinstance(a, FinitePoints) and isinstance(b, ZeroSet):
        return all(b.contains(p) for p in a.fpoints)
    if isinstance(a, ZeroSet) and isinstance(b, ZeroSet):
        if a.sigma == b.sigma:
            return True
        bs = b.sigma
        return bool(getattr(bs, "factors", None)) and a.sigma in bs.factors
    return False


def foam_to_multifoam(T: GenFunction,
                      family: SingularityFamily) -> GenFunction:
    """The canonical surjection from the single-set quotient onto the
    family quotient: the representative is unchanged, only the ideal
    grows."""
    if T.ideal.mode != "single":
        raise FoamError("source must be a single-set quotient")
    sigma = T.ideal.sigma
    dominated = family.accepts(sigma) or any(
        _sigma_contained(sigma, g) for g in family.generators)
    if not dominated:
        raise FoamError("the singularity set is not dominated by the family")
    rep = FoamSequence(
        T.rep.order, T.rep.domain, T.rep.term,
        descriptor=T.rep.descriptor, witness_hint=T.rep.witness_hint,
        sigma_hints=(sigma,) + T.rep.sigma_hints, notes=T.rep.notes)
    return GenFunction(rep, family_ideal(family, T.ideal.order))


def rho_restrict(emb: CofinalEmbedding, s: FoamSequence) -> FoamSequence:
    """Pull a sequence over the larger order back along a cofinal
    embedding (lazily: source index i selects target term at map(i))."""
    if s.order != emb.target:
        raise FoamError("sequence is not indexed by the embedding target")
    hint = None
    if s.witness_hint is not None:
        th = s.witness_hint
        hint = lambda x: emb.dominate(th(x))  # noqa: E731
    return FoamSequence(
        emb.source, s.domain, lambda i: s.term(emb.map(i)),
        descriptor={"generator": "rho_restrict", "embedding": emb.name,
                    "of": s.descriptor},
        witness_hint=hint, sigma_hints=s.sigma_hints, notes=s.notes)


# ---------------------------------------------------------------------------
# off-diagonality


@dataclass(frozen=True)
class OffDiagonalEntry:
    psi: str
    status: str
    point: Optional[Point]
    value: Optional[float]


@dataclass(frozen=True)
class OffDiagonalReport:
    entries: Tuple[OffDiagonalEntry, ...]

    @property
    def all_refuted(self) -> bool:
        return all(e.status == "refuted" for e in self.entries)

    def to_json(self):
        return {"all_refuted": self.all_refuted,
                "entries": [{"psi": e.psi, "status": e.status,
                             "point": None if e.point is None
                             else list(e.point),
                             "value": e.value} for e in self.entries]}


def off_diagonality_suite(d: IdealDescriptor, psis: Sequence[SmoothExpr],
                          cfg: MembershipConfig = DEFAULT_CONFIG) \
        -> OffDiagonalReport:
    """The ideal meets the diagonal only in zero: for each nonzero psi,
    membership of the constant sequence must be refuted at some sample
    point with dense-complement backing."""
    entries = []
    for psi in psis:
        if is_structural_zero(psi):
            raise FoamError("off-diagonality inputs must be nonzero")
        r = check_membership(diagonal(psi, d.order, d.domain), d, cfg)
        if r.refuted:
            a = r.refutation.attempts[0]
            entries.append(OffDiagonalEntry(to_sexpr(psi), "refuted",
                                            r.refutation.point, a.value))
        else:
            entries.append(OffDiagonalEntry(to_sexpr(psi), r.status,
                                            None, None))
    return OffDiagonalReport(tuple(entries))
