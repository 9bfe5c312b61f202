"""Bump, step, plateau and partition-of-unity constructions.

Everything is assembled from the glue primitive g(t) = exp(-1/t) (t>0).
The basic smooth step is

    s(u) = g(u) / (g(u) + g(1-u)),

which is exactly 0 for u <= 0 (the numerator is a hard zero there) and
exactly 1 for u >= 1 (where g(1-u) vanishes identically).  Its
complement written over the *same* denominator,

    cos(u) = g(1-u) / (g(u) + g(1-u)),

is the same function as 1 - s(u) but with the hard zero on the other
side, so plateau constructions can present whichever side needs to be
certified as structurally zero.  Division is an integer power node with
globally positive base, so all of this stays inside the closed node
language.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .domains import Box, DomainError, OpenSet
from .expr import (ONE, SmoothExpr, add, const, coord, eval_with_certificate,
                   evaluate, glue, mul, pow_, subst)


def glue_exp(u) -> SmoothExpr:
    """g(u) = exp(-1/u) for u > 0, hard 0 for u <= 0."""
    return glue([1], 0, u)


def _step_denominator(u) -> SmoothExpr:
    return add(glue_exp(u), glue_exp(add(ONE, mul(const(-1), u))))


def smooth_step(u) -> SmoothExpr:
    """s(u): hard 0 on u <= 0, numerically 1 on u >= 1, in (0,1) between."""
    return mul(glue_exp(u), pow_(_step_denominator(u), -1))


def co_step(u) -> SmoothExpr:
    """1 - s(u) over the shared denominator: hard 0 on u >= 1."""
    return mul(glue_exp(add(ONE, mul(const(-1), u))),
               pow_(_step_denominator(u), -1))


class TransitionEta:
    """The distinguished transition function: 0 on [-1/2, 1/2], 1 on
    |t| >= 1, values in [0, 1], smooth everywhere."""

    __slots__ = ("expr",)

    def __init__(self, expr: SmoothExpr):
        self.expr = expr

    def __call__(self, t: float) -> float:
        return evaluate(self.expr, (t,))


def make_eta() -> TransitionEta:
    """eta(t) = s(2t - 1) + s(-2t - 1) with the canonical smooth step.

    Both implementations of this construction agree on the expression
    tree bit for bit; numeric values then agree to double precision.
    """
    t = coord(0)
    u = add(mul(const(2), t), const(-1))
    v = add(mul(const(-2), t), const(-1))
    return TransitionEta(add(smooth_step(u), smooth_step(v)))


def shrinking_plateau(sigma: SmoothExpr, level: int) -> SmoothExpr:
    """The complement 1 - eta((level+1) * sigma), written as a single
    fraction so both plateaus are certifiable:

        [g(1-u) g(1-v) - g(u) g(v)] / [(g(u)+g(1-u)) (g(v)+g(1-v))]

    with u = 2*tau - 1, v = -2*tau - 1, tau = (level+1)*sigma.  The
    numerator is a hard zero wherever |sigma| >= 1/(level+1) (and so are
    all its derivatives), and the value is 1 on the zero set of sigma.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    tau = mul(const(level + 1), sigma)
    u = add(mul(const(2), tau), const(-1))
    v = add(mul(const(-2), tau), const(-1))
    gu = glue_exp(u)
    gv = glue_exp(v)
    gcu = glue_exp(add(ONE, mul(const(-1), u)))
    gcv = glue_exp(add(ONE, mul(const(-1), v)))
    numerator = add(mul(gcu, gcv), mul(const(-1), gu, gv))
    denominator = mul(add(gu, gcu), add(gv, gcv))
    return mul(numerator, pow_(denominator, -1))


# ---------------------------------------------------------------------------
# partitions of unity on box-union covers


class CoverError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


_SUPPORT_SHRINK = Fraction(1, 256)  # per-axis margin as a fraction of width


def _axis_window(axis: int, lo, hi) -> SmoothExpr:
    """1-axis bump factor with support [lo, hi] (hard zero outside);
    infinite endpoints contribute no factor on that side."""
    x = coord(axis)
    parts = []
    if lo is not None:
        parts.append(glue_exp(add(x, const(-lo))))
    if hi is not None:
        parts.append(glue_exp(add(const(hi), mul(const(-1), x))))
    if not parts:
        return ONE
    return mul(*parts)


def box_window(box: Box, shrink: Fraction = _SUPPORT_SHRINK) -> SmoothExpr:
    """Positive bump on the shrunk open box, hard zero outside it.  The
    shrink keeps the support inside a compact subset of the box."""
    factors = []
    for axis, (lo, hi) in enumerate(box.intervals):
        if lo is not None and hi is not None:
            m = (hi - lo) * shrink
            factors.append(_axis_window(axis, lo + m, hi - m))
        elif lo is not None:
            factors.append(_axis_window(axis, lo + shrink, None))
        elif hi is not None:
            factors.append(_axis_window(axis, None, hi - shrink))
        else:
            factors.append(ONE)
    return mul(*factors)


class PartitionOfUnity:
    """Pieces (alpha, cover_index) with supp alpha inside its cover
    element; the pieces sum to 1 on the verification grid."""

    __slots__ = ("pieces", "cover", "domain", "max_deviation",
                 "locality_radius")

    def __init__(self, pieces, cover, domain, max_deviation, locality_radius):
        self.pieces = tuple(pieces)
        self.cover = tuple(cover)
        self.domain = domain
        self.max_deviation = max_deviation
        self.locality_radius = locality_radius

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)


def partition_of_unity(domain: OpenSet, cover, locality_radius: float = 0.25,
                       grid_resolution: int = 33,
                       tol: float = 1e-12) -> PartitionOfUnity:
    """Smooth partition of unity on ``domain`` subordinate to ``cover``
    (a finite list of OpenSets).

    Each piece is a normalised window bump supported in a compact subset
    of its cover element; the sum is verified to equal 1 on the sample
    grid to ``tol``.  Finitely many pieces make the locality requirement
    (a radius around each grid point meeting only finitely many
    supports) automatic, but the radius is still recorded.  Raises
    :class:`CoverError` with a witness grid point when the cover misses
    part of the domain.
    """
    cover = list(cover)
    if not cover:
        raise CoverError("empty cover")
    for c in cover:
        if c.dimension != domain.dimension:
            raise CoverError("cover element dimension mismatch")

    if len(cover) == 1 and cover[0].contains_set(domain):
        return PartitionOfUnity([(ONE, 0)], cover, domain, 0.0,
                                locality_radius)

    bumps = []
    for idx, element in enumerate(cover):
        b = add(*(box_window(box) for box in element.boxes))
        bumps.append((b, idx))

    grid = domain.sample_grid(grid_resolution)
    total = add(*(b for b, _ in bumps))
    for x in grid:
        v, hard = eval_with_certificate(total, x)
        if hard or v <= 0.0:
            raise CoverError(f"cover misses the domain near {x}", witness=x)

    inv = pow_(total, -1)
    pieces = [(mul(b, inv), idx) for b, idx in bumps]

    dev = 0.0
    s = add(*(p for p, _ in pieces))
    for x in grid:
        dev = max(dev, abs(evaluate(s, x) - 1.0))
    if dev > tol:
        raise CoverError(f"partition sum deviates by {dev} (tol {tol})")
    return PartitionOfUnity(pieces, cover, domain, dev, locality_radius)


# ---------------------------------------------------------------------------
# growing interior plateaus for box unions (flabby extension machinery)


def _axis_inside(axis: int, lo, hi) -> SmoothExpr:
    """Expression positive strictly inside (lo, hi), <= 0 outside."""
    x = coord(axis)
    if lo is not None and hi is not None:
        return mul(add(x, const(-lo)), add(const(hi), mul(const(-1), x)))
    if lo is not None:
        return add(x, const(-lo))
    if hi is not None:
        return add(const(hi), mul(const(-1), x))
    return ONE


def _boxes_disjoint(a: Box, b: Box) -> bool:
    for (alo, ahi), (blo, bhi) in zip(a.intervals, b.intervals):
        if ahi is not None and blo is not None and ahi <= blo:
            return True
        if bhi is not None and alo is not None and bhi <= alo:
            return True
    return False


def plateau_pair(region: OpenSet, level: int):
    """(beta, co) for the growing-plateau family of a box union.

    beta is 1 on an inner region that exhausts ``region`` as the level
    grows, with support in a compact subset of ``region``; co is the
    same function as 1 - beta but arranged (telescoped over the step
    complements) so that it and all its derivatives are hard zeros on
    the plateau.  Boxes of the region must be pairwise disjoint, which
    keeps the per-box plateaus from overlapping.
    """
    boxes = region.boxes
    for i, a in enumerate(boxes):
        for b in boxes[i + 1:]:
            if not _boxes_disjoint(a, b):
                raise DomainError(
                    "plateau_pair needs pairwise disjoint boxes")
    scale = const(level + 1)
    betas = []
    cos_ = []
    for box in boxes:
        steps = []
        for axis, (lo, hi) in enumerate(box.intervals):
            inside = _axis_inside(axis, lo, hi)
            if inside == ONE:
                continue
            w = add(mul(scale, inside), const(-1))
            steps.append(w)
        if not steps:
            betas.append(ONE)
            cos_.append(const(0))
            continue
        betas.append(mul(*(smooth_step(w) for w in steps)))
        # 1 - prod s_j  ==  sum_j (prod_{i<j} s_i) * (1 - s_j)
        tele = []
        for j, w in enumerate(steps):
            prefix = [smooth_step(wp) for wp in steps[:j]]
            tele.append(mul(*prefix, co_step(w)))
        cos_.append(add(*tele))
    beta = add(*betas)
    co = mul(*cos_) if len(cos_) > 1 else cos_[0]
    return beta, co


def plateau_level(region: OpenSet, x, margin: int = 0) -> int:
    """Smallest level whose plateau provably contains x (plus margin).

    For a point strictly inside a box this solves (level+1)*inside >= 2
    per axis; points outside every box get level 0 (where beta and all
    derivatives are hard zeros anyway).
    """
    for box in region.boxes:
        if not box.contains(x):
            continue
        need = 0.0
        for axis, (lo, hi) in enumerate(box.intervals):
            inside = evaluate(_axis_inside(axis, lo, hi), x)
            if inside <= 0.0:  # on a face: no finite level works
                return None
            need = max(need, 2.0 / inside)
        return max(0, math.ceil(need) - 1 + margin)
    return 0
