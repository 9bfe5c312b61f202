"""Points, multi-indices and box-union open sets.

Open sets are finite unions of open axis-aligned boxes with rational
(or infinite) endpoints.  That keeps membership decidable for rational
points, boundary polynomials exact, and lets every set produce a
deterministic sample grid of any requested resolution.  General open
sets are deliberately out of scope.

Everything is immutable; grid generation is pure.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

Point = Tuple[float, ...]
MultiIndex = Tuple[int, ...]

# endpoints: Fraction, or None meaning -inf (left) / +inf (right)
Endpoint = Optional[Fraction]

_GRID_CLAMP = Fraction(10)  # unbounded axes are sampled inside (-10, 10)


class DomainError(ValueError):
    pass


def as_point(coords: Iterable) -> Point:
    return tuple(float(c) for c in coords)


def multiindices(dim: int, max_total: int) -> Tuple[MultiIndex, ...]:
    """All multi-indices with |p| <= max_total, sorted by (|p|, lex)."""
    out = []
    for total in range(max_total + 1):
        for p in itertools.product(range(total + 1), repeat=dim):
            if sum(p) == total:
                out.append(p)
    return tuple(out)


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10 ** 12)
    return Fraction(v)


class Box:
    """Open axis-aligned box, one (lo, hi) interval per axis."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Sequence[Tuple[Endpoint, Endpoint]]):
        ivs = []
        for lo, hi in intervals:
            lo = None if lo is None else _frac(lo)
            hi = None if hi is None else _frac(hi)
            if lo is not None and hi is not None and lo >= hi:
                raise DomainError(f"degenerate interval ({lo}, {hi})")
            ivs.append((lo, hi))
        if not ivs:
            raise DomainError("boxes need at least one axis")
        self.intervals = tuple(ivs)

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    def contains(self, x: Sequence[float]) -> bool:
        for (lo, hi), c in zip(self.intervals, x):
            if lo is not None and not c > lo:
                return False
            if hi is not None and not c < hi:
                return False
        return True

    def clamped(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        out = []
        for lo, hi in self.intervals:
            lo = -_GRID_CLAMP if lo is None else lo
            hi = _GRID_CLAMP if hi is None else hi
            if lo >= hi:  # pragma: no cover - only for far-away boxes
                raise DomainError("box lies outside the sampling window")
            out.append((lo, hi))
        return tuple(out)

    def widths(self) -> Tuple[Fraction, ...]:
        return tuple(hi - lo for lo, hi in self.clamped())

    def __eq__(self, other):
        return isinstance(other, Box) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        parts = ", ".join(
            f"({'-inf' if lo is None else lo}, {'inf' if hi is None else hi})"
            for lo, hi in self.intervals)
        return f"Box[{parts}]"

    def to_json(self):
        def num(v):
            if v is None:
                return None
            return [v.numerator, v.denominator]
        return [[num(lo), num(hi)] for lo, hi in self.intervals]

    @staticmethod
    def from_json(data) -> "Box":
        def num(v):
            if v is None:
                return None
            if isinstance(v, list):
                return Fraction(v[0], v[1])
            return Fraction(v)
        return Box([(num(lo), num(hi)) for lo, hi in data])


def _sort_key(b: Box):
    def k(v, neg):
        if v is None:
            return (0, 0) if neg else (2, 0)
        return (1, v)
    return tuple((k(lo, True), k(hi, False)) for lo, hi in b.intervals)


class OpenSet:
    """Finite union of open boxes; membership is union membership."""

    __slots__ = ("dimension", "boxes")

    def __init__(self, dimension: int, boxes: Sequence[Box]):
        if dimension < 1:
            raise DomainError("dimension must be positive")
        boxes = tuple(sorted(set(boxes), key=_sort_key))
        if not boxes:
            raise DomainError("open sets here are nonvoid")
        for b in boxes:
            if b.dimension != dimension:
                raise DomainError("box dimension mismatch")
        self.dimension = dimension
        self.boxes = boxes

    # -- constructors ---------------------------------------------------
    @staticmethod
    def interval(lo, hi) -> "OpenSet":
        return OpenSet(1, [Box([(lo, hi)])])

    @staticmethod
    def box(*intervals) -> "OpenSet":
        return OpenSet(len(intervals), [Box(intervals)])

    def union(self, other: "OpenSet") -> "OpenSet":
        if other.dimension != self.dimension:
            raise DomainError("dimension mismatch in union")
        return OpenSet(self.dimension, self.boxes + other.boxes)

    def intersect(self, other: "OpenSet") -> Optional["OpenSet"]:
        if other.dimension != self.dimension:
            raise DomainError("dimension mismatch in intersection")
        out = []
        for a in self.boxes:
            for b in other.boxes:
                ivs = []
                empty = False
                for (alo, ahi), (blo, bhi) in zip(a.intervals, b.intervals):
                    lo = blo if alo is None else (
                        alo if blo is None else max(alo, blo))
                    hi = bhi if ahi is None else (
                        ahi if bhi is None else min(ahi, bhi))
                    if lo is not None and hi is not None and lo >= hi:
                        empty = True
                        break
                    ivs.append((lo, hi))
                if not empty:
                    out.append(Box(ivs))
        if not out:
            return None
        return OpenSet(self.dimension, out)

    # -- predicates -------------------------------------------------------
    def contains(self, x: Sequence[float]) -> bool:
        return any(b.contains(x) for b in self.boxes)

    def contains_set(self, other: "OpenSet") -> bool:
        """Exact containment test for box unions, up to boundary slivers
        of zero volume (all endpoints are rationals, so the subtraction
        is exact)."""
        if other.dimension != self.dimension:
            return False
        clamp = self._common_clamp(other)

        def widen(b: Box):
            return tuple((-clamp if lo is None else lo,
                          clamp if hi is None else hi)
                         for lo, hi in b.intervals)

        mine = [widen(b) for b in self.boxes]
        rem = [widen(b) for b in other.boxes]
        for cut in mine:
            nxt = []
            for r in rem:
                nxt.extend(_box_subtract(r, cut))
            rem = nxt
            if not rem:
                return True
        return not rem

    def _common_clamp(self, other):
        vals = [abs(v) for s in (self, other) for b in s.boxes
                for iv in b.intervals for v in iv if v is not None]
        m = max(vals, default=Fraction(1)) + 1
        return m

    # -- grids ------------------------------------------------------------
    def sample_grid(self, resolution: int) -> Tuple[Point, ...]:
        """Cell midpoints, `resolution` cells per axis per box.
        Deterministic and sorted; duplicates across boxes removed."""
        if resolution < 1:
            raise DomainError("resolution must be positive")
        pts = set()
        for b in self.boxes:
            for cell_mid in self._box_mids(b, resolution):
                pts.add(cell_mid)
        return tuple(sorted(pts))

    @staticmethod
    def _box_mids(b: Box, res: int):
        axes = []
        for lo, hi in b.clamped():
            w = hi - lo
            axes.append([float(lo + w * Fraction(2 * i + 1, 2 * res))
                         for i in range(res)])
        return itertools.product(*axes)

    def cells(self, resolution: int):
        """(cell box, midpoint) pairs; cells may overlap across boxes."""
        out = []
        for b in self.boxes:
            axes = []
            for lo, hi in b.clamped():
                w = hi - lo
                axes.append([(lo + w * Fraction(i, resolution),
                              lo + w * Fraction(i + 1, resolution))
                             for i in range(resolution)])
            for combo in itertools.product(*axes):
                mid = tuple(float((lo + hi) / 2) for lo, hi in combo)
                out.append((Box(combo), mid))
        return out

    def min_width(self) -> Fraction:
        return min(w for b in self.boxes for w in b.widths())

    def __eq__(self, other):
        return (isinstance(other, OpenSet)
                and self.dimension == other.dimension
                and self.boxes == other.boxes)

    def __hash__(self):
        return hash((self.dimension, self.boxes))

    def __repr__(self):
        return f"OpenSet({self.dimension}, {list(self.boxes)!r})"

    def to_json(self):
        return {"dimension": self.dimension,
                "boxes": [b.to_json() for b in self.boxes]}

    @staticmethod
    def from_json(data) -> "OpenSet":
        return OpenSet(data["dimension"],
                       [Box.from_json(b) for b in data["boxes"]])


def _box_subtract(r, cut):
    """Subtract one closed box from another; returns remainder boxes of
    positive volume (zero-width slabs are dropped, which is exactly the
    'up to boundary' semantics used for open containment)."""
    for (rlo, rhi), (clo, chi) in zip(r, cut):
        if clo >= rhi or chi <= rlo:
            return [r]  # disjoint on this axis
    out = []
    core = []
    for (rlo, rhi), (clo, chi) in zip(r, cut):
        lo = max(rlo, clo)
        hi = min(rhi, chi)
        core.append((lo, hi))
    for axis, ((rlo, rhi), (lo, hi)) in enumerate(zip(r, core)):
        if rlo < lo:
            out.append(tuple(core[:axis]) + ((rlo, lo),) + tuple(r[axis + 1:]))
        if hi < rhi:
            out.append(tuple(core[:axis]) + ((hi, rhi),) + tuple(r[axis + 1:]))
    return [b for b in out
            if all(hi > lo for lo, hi in b)]
