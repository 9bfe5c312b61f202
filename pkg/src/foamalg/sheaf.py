"""Restriction, gluing, separatedness, unit partitions and flabby
extension of generalized functions over open covers, plus chart-based
atlases for low-dimensional manifolds.

Sections are generalized functions over family ideals; restriction
narrows both the domain and the singularity family.  Gluing assembles
a global representative as a partition-of-unity combination of the
pieces (products with the partition functions extend by zero since the
partition supports sit compactly inside the cover elements).  Flabby
extension multiplies a section on an inner region by a growing-plateau
family supported there; the certificates it produces live over the
empty singularity set on the inner region.

All operations are pure on immutable inputs; per-piece verification is
independent across the cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

from .bump import (PartitionOfUnity, partition_of_unity, plateau_level,
                   plateau_pair)
from .domains import Box, OpenSet, Point
from .expr import (ONE, SmoothExpr, add, const, coord, evaluate, mul, subst,
                   to_sexpr)
from .foam import (DEFAULT_CONFIG, FoamSequence, GenFunction, IdealDescriptor,
                   MembershipConfig, MembershipResult, check_membership,
                   diagonal, embed_smooth, eq_mod_ideal, family_ideal,
                   nontrivial_nd, off_diagonality_suite, single_ideal)
from .orders import NAT, CofinalEmbedding, identity_embedding
from .singular import (EmptySet, SingularityFamily, SingularSet, ZeroSet)


class SheafError(ValueError):
    pass


class GlueError(SheafError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# restriction


def restrict(T: GenFunction, V: OpenSet) -> GenFunction:
    """Restrict a generalized function to a nonvoid open subset; the
    ideal's singularity data is intersected with V."""
    X = T.ideal.domain
    if V.dimension != X.dimension or not X.contains_set(V):
        raise SheafError("restriction target must be a subset of the domain")
    return GenFunction(T.rep.with_domain(V), T.ideal.restrict(V))


# ---------------------------------------------------------------------------
# gluing


@dataclass(frozen=True)
class SectionAssignment:
    """Pieces of a would-be section: cover elements of a common domain
    V and one generalized function per element, all over restrictions
    of one family ideal on V."""

    cover: Tuple[OpenSet, ...]
    pieces: Tuple[GenFunction, ...]
    ideal: IdealDescriptor  # the family ideal on V

    def __post_init__(self):
        if len(self.cover) != len(self.pieces):
            raise SheafError("one piece per cover element required")
        if self.ideal.mode != "family":
            raise SheafError("gluing needs a family ideal")
        for Vi, Ti in zip(self.cover, self.pieces):
            if Ti.ideal.order != self.ideal.order:
                raise SheafError("piece index order mismatch")
            if Ti.ideal.domain != Vi:
                raise SheafError("piece does not live on its cover element")

    @property
    def domain(self) -> OpenSet:
        return self.ideal.domain


@dataclass(frozen=True)
class GlueResult:
    section: GenFunction
    overlap_checks: Tuple[Tuple[int, int, str], ...]
    restriction_checks: Tuple[Tuple[int, str], ...]

    @property
    def verified(self) -> bool:
        return all(s == "verified" for _, s in self.restriction_checks)

    def to_json(self):
        return {"overlaps": [{"i": i, "j": j, "status": s}
                             for i, j, s in self.overlap_checks],
                "restrictions": [{"i": i, "status": s}
                                 for i, s in self.restriction_checks],
                "verified": self.verified}


def glue(sections: SectionAssignment, pou: PartitionOfUnity,
         cfg: MembershipConfig = DEFAULT_CONFIG) -> GlueResult:
    """Assemble one section from compatible pieces.

    Pairwise compatibility on overlaps is verified first (an
    incompatible pair raises :class:`GlueError` with the refuting
    point); the result's representative is the partition-weighted sum
    of the piece representatives, and its restrictions back to the
    cover are re-verified against the pieces.
    """
    V = sections.domain
    cover = sections.cover
    pieces = sections.pieces
    if tuple(pou.cover) != tuple(cover):
        raise GlueError("partition data does not match the cover")

    overlap_checks = []
    for i in range(len(cover)):
        for j in range(i + 1, len(cover)):
            O = cover[i].intersect(cover[j])
            if O is None:
                continue
            r = eq_mod_ideal(restrict(pieces[i], O), restrict(pieces[j], O),
                             cfg)
            overlap_checks.append((i, j, r.status))
            if r.refuted:
                raise GlueError(
                    f"pieces {i} and {j} disagree on their overlap",
                    witness=r.refutation.point)

    ideal = sections.ideal
    order = ideal.order
    rep: Optional[FoamSequence] = None
    for alpha, idx in pou.pieces:
        term = diagonal(alpha, order, V) * pieces[idx].rep.with_domain(V)
        rep = term if rep is None else rep + term
    glued = GenFunction(rep, ideal)

    restriction_checks = []
    for i, (Vi, Ti) in enumerate(zip(cover, pieces)):
        r = eq_mod_ideal(restrict(glued, Vi), Ti, cfg)
        restriction_checks.append((i, r.status))
    return GlueResult(glued, tuple(overlap_checks), tuple(restriction_checks))


# ---------------------------------------------------------------------------
# separatedness


@dataclass(frozen=True)
class SeparatedResult:
    status: str  # verified | refuted | inconclusive
    piece_results: Tuple[Tuple[int, str], ...]
    assembled: Optional[MembershipResult]

    @property
    def verified(self):
        return self.status == "verified"

    def to_json(self):
        return {"status": self.status,
                "pieces": [{"i": i, "status": s}
                           for i, s in self.piece_results]}


def separated_check(T: GenFunction, Tp: GenFunction,
                    cover: Sequence[OpenSet],
                    cfg: MembershipConfig = DEFAULT_CONFIG,
                    pou: Optional[PartitionOfUnity] = None) -> SeparatedResult:
    """Sections agreeing on every element of a cover agree: certify the
    per-piece differences, then assemble the partition-weighted global
    difference and certify it against the union of the per-piece
    singularity sets."""
    T._require_same_ideal(Tp)
    V = T.ideal.domain
    if pou is None:
        pou = partition_of_unity(V, cover)
    piece_results = []
    piece_sigmas = []
    for i, Vi in enumerate(cover):
        r = eq_mod_ideal(restrict(T, Vi), restrict(Tp, Vi), cfg)
        piece_results.append((i, r.status))
        if r.verified:
            piece_sigmas.append(r.certificate.sigma)
        elif r.refuted:
            return SeparatedResult("refuted", tuple(piece_results), None)
    if any(s != "verified" for _, s in piece_results):
        return SeparatedResult("inconclusive", tuple(piece_results), None)

    diff = T.rep - Tp.rep
    rep: Optional[FoamSequence] = None
    for alpha, idx in pou.pieces:
        term = diagonal(alpha, T.ideal.order, V) * diff
        rep = term if rep is None else rep + term
    # union of the per-piece singularity sets, assembled inside the family
    family = T.ideal.family
    sigma = EmptySet(V)
    for s in piece_sigmas:
        lifted = s if s.domain == V else _lift_set(s, V)
        sigma = family.union_join(sigma, lifted)
    rep = FoamSequence(rep.order, rep.domain, rep.term,
                       descriptor={"generator": "separated_difference"},
                       witness_hint=rep.witness_hint,
                       sigma_hints=(sigma,) + rep.sigma_hints)
    assembled = check_membership(rep, T.ideal, cfg)
    status = assembled.status
    return SeparatedResult(status, tuple(piece_results), assembled)


def _lift_set(s: SingularSet, V: OpenSet) -> SingularSet:
    """Re-domain a singularity set onto a larger open set (formulas and
    point data transfer unchanged)."""
    if isinstance(s, EmptySet):
        return EmptySet(V)
    if isinstance(s, ZeroSet):
        return ZeroSet(s.sigma, V, nowhere_dense=s.is_nowhere_dense)
    import copy
    c = copy.copy(s)
    c.domain = V
    return c


# ---------------------------------------------------------------------------
# fineness: the unit as a partition sum


@dataclass(frozen=True)
class UnitPartitionResult:
    status: str
    max_deviation: float
    membership: MembershipResult

    @property
    def verified(self):
        return self.status == "verified"


def unit_partition_identity(pou: PartitionOfUnity, ideal: IdealDescriptor,
                            cfg: MembershipConfig = DEFAULT_CONFIG,
                            grid_resolution: int = 101) -> UnitPartitionResult:
    """The partition functions sum to the unit section: checks the raw
    grid deviation of the sum from 1 and certifies equality mod the
    ideal on a fine grid."""
    V = ideal.domain
    if pou.domain != V:
        raise SheafError("partition lives on a different domain")
    total = add(*(a for a, _ in pou.pieces))
    dev = 0.0
    for x in V.sample_grid(grid_resolution):
        dev = max(dev, abs(evaluate(total, x) - 1.0))
    S = embed_smooth(total, ideal)
    unit = embed_smooth(ONE, ideal)
    r = eq_mod_ideal(S, unit, replace(cfg, grid_resolution=grid_resolution))
    status = r.status if dev <= cfg.hard_tol else "refuted"
    return UnitPartitionResult(status, dev, r)


# ---------------------------------------------------------------------------
# boundary functions and flabby extension


@dataclass(frozen=True)
class BoundaryFunction:
    """A smooth function on V whose zero set is a closed nowhere dense
    superset of the boundary of the target subset in V (the superset
    may include whole face hyperplanes; any closed nowhere dense set
    containing the boundary serves)."""

    sigma_prime: SmoothExpr
    target: OpenSet
    domain: OpenSet

    def gamma(self) -> SingularSet:
        if self.sigma_prime == ONE:
            return EmptySet(self.domain)
        return ZeroSet(self.sigma_prime, self.domain, nowhere_dense=True)


def boundary_function(Vprime: OpenSet, V: OpenSet) -> BoundaryFunction:
    """Product of the face polynomials (x_axis - c) over the finite box
    faces of ``Vprime`` that meet V; the empty product (target filling
    the domain) degenerates to the constant 1."""
    if not V.contains_set(Vprime):
        raise SheafError("target must sit inside the ambient open set")
    faces = []
    for box in Vprime.boxes:
        for axis, (lo, hi) in enumerate(box.intervals):
            for c in (lo, hi):
                if c is None:
                    continue
                if (axis, c) in faces:
                    continue
                if _face_meets(V, box, axis, c):
                    faces.append((axis, c))
    if not faces:
        return BoundaryFunction(ONE, Vprime, V)
    sigma = mul(*(add(coord(axis), const(-c)) for axis, c in faces))
    return BoundaryFunction(sigma, Vprime, V)


def _face_meets(V: OpenSet, box: Box, axis: int, c) -> bool:
    for vb in V.boxes:
        vlo, vhi = vb.intervals[axis]
        if vlo is not None and not c > vlo:
            continue
        if vhi is not None and not c < vhi:
            continue
        ok = True
        for a, (lo, hi) in enumerate(box.intervals):
            if a == axis:
                continue
            blo, bhi = vb.intervals[a]
            # closed face range against the open chart interval
            if bhi is not None and lo is not None and not lo < bhi:
                ok = False
                break
            if blo is not None and hi is not None and not blo < hi:
                ok = False
                break
        if ok:
            return True
    return False


@dataclass(frozen=True)
class FlabbyResult:
    extension: GenFunction
    restriction_identity: MembershipResult
    boundary: BoundaryFunction
    levels: Tuple  # (index element, plateau level) samples for the report

    @property
    def verified(self):
        return self.restriction_identity.status == "verified"


def flabby_extend(Tprime: GenFunction, V: OpenSet,
                  emb: Optional[CofinalEmbedding] = None,
                  cfg: MembershipConfig = DEFAULT_CONFIG) -> FlabbyResult:
    """Extend a section on an inner open set to all of V.

    Term at lambda is beta_{l} * t'_lambda with l the least integer
    dominating lambda through the cofinal embedding and beta the
    growing plateau family supported inside the inner set.  The
    difference between the original section and the restriction of the
    extension is certified over the *empty* singularity set on the
    inner region, using the complementary plateau whose vanishing there
    is structural.
    """
    ideal_p = Tprime.ideal
    if ideal_p.mode != "family":
        raise SheafError("flabby extension needs a family ideal (the "
                         "family must absorb extra nowhere dense sets)")
    if ideal_p.family.label == "custom":
        raise SheafError("a custom family cannot absorb the boundary set")
    Vp = ideal_p.domain
    if not V.contains_set(Vp):
        raise SheafError("the section's domain must sit inside V")
    order = ideal_p.order
    if emb is None:
        if order != NAT:
            raise SheafError("a cofinal embedding of the naturals into "
                             "the index order is required")
        emb = identity_embedding(NAT)
    if emb.source != NAT or emb.target != order:
        raise SheafError("embedding must map the naturals cofinally "
                         "into the index order")

    boundary = boundary_function(Vp, V)

    plateaus = {}

    def plateau(level: int):
        p = plateaus.get(level)
        if p is None:
            p = plateau_pair(Vp, level)
            plateaus[level] = p
        return p

    def ext_term(lam):
        level = emb.dominate(lam)
        beta, _ = plateau(level)
        return mul(beta, Tprime.rep.term(lam))

    family_V = _lift_family(ideal_p.family, V, extra=boundary.gamma())
    extension = GenFunction(
        FoamSequence(order, V, ext_term,
                     descriptor={"generator": "flabby_extend",
                                 "of": Tprime.rep.descriptor},
                     # inner hints are formula-based, hence valid on V;
                     # outside the support any index works anyway
                     witness_hint=Tprime.rep.witness_hint,
                     sigma_hints=tuple(_lift_set(s, V)
                                       for s in Tprime.rep.sigma_hints)),
        family_ideal(family_V, order))

    def diff_term(lam):
        level = emb.dominate(lam)
        _, co = plateau(level)
        return mul(co, Tprime.rep.term(lam))

    def diff_hint(x):
        level = plateau_level(Vp, x)
        if level is None:
            return None
        return emb.map(level)

    diff = FoamSequence(order, Vp, diff_term,
                        descriptor={"generator": "flabby_difference"},
                        witness_hint=diff_hint)
    identity = check_membership(diff, single_ideal(EmptySet(Vp), order,
                                                   verify=False), cfg)
    levels = tuple((emb.map(l), l) for l in (0, 1, 4))
    return FlabbyResult(extension, identity, boundary, levels)


def _lift_family(family: SingularityFamily, V: OpenSet,
                 extra: Optional[SingularSet] = None) -> SingularityFamily:
    gens = [_lift_set(g, V) for g in family.generators]
    if extra is not None and not isinstance(extra, EmptySet):
        gens.append(extra)
    return SingularityFamily(family.label, gens, V, verify=False)


# ---------------------------------------------------------------------------
# chart atlases


@dataclass(frozen=True)
class Chart:
    name: str
    box: OpenSet


@dataclass(frozen=True)
class Transition:
    """One connected overlap component, with the coordinate change and
    its inverse as expression tuples."""

    frm: str
    to: str
    domain: OpenSet  # in `frm` coordinates
    forward: Tuple[SmoothExpr, ...]
    inverse: Tuple[SmoothExpr, ...]


@dataclass(frozen=True)
class ChartAtlas:
    label: str
    charts: Tuple[Chart, ...]
    transitions: Tuple[Transition, ...]

    def chart(self, name: str) -> Chart:
        for c in self.charts:
            if c.name == name:
                return c
        raise SheafError(f"no chart named {name!r}")

    def validate(self, samples: int = 8, tol: float = 1e-10) -> dict:
        """Round-trip every transition on a sample grid of its overlap
        component and confirm both directions are declared."""
        worst = 0.0
        declared = {(t.frm, t.to) for t in self.transitions}
        for t in self.transitions:
            if (t.to, t.frm) not in declared:
                raise SheafError(
                    f"missing reverse transition {t.to} -> {t.frm}")
            for x in t.domain.sample_grid(samples):
                y = tuple(evaluate(f, x) for f in t.forward)
                back = tuple(evaluate(g, y) for g in t.inverse)
                err = max(abs(a - b) for a, b in zip(back, x))
                worst = max(worst, err)
        if worst > tol:
            raise SheafError(f"transition round-trip error {worst} "
                             f"exceeds {tol}")
        return {"transitions": len(self.transitions),
                "max_roundtrip_error": worst}


_TWO_PI = 6.283185307179586


def circle_atlas() -> ChartAtlas:
    """Two angle charts covering the circle, overlapping in two arcs;
    the coordinate change is a shift by 0 or by the full turn."""
    x = coord(0)
    a = Chart("A", OpenSet.interval(-2.4, 2.4))
    b = Chart("B", OpenSet.interval(0.8, 5.6))
    shift = lambda c: (add(x, const(c)),)  # noqa: E731
    ident = (x,)
    t = [
        Transition("A", "B", OpenSet.interval(0.8, 2.4), ident, ident),
        Transition("B", "A", OpenSet.interval(0.8, 2.4), ident, ident),
        Transition("A", "B", OpenSet.interval(-2.4, 5.6 - _TWO_PI),
                   shift(_TWO_PI), shift(-_TWO_PI)),
        Transition("B", "A", OpenSet.interval(_TWO_PI - 2.4, 5.6),
                   shift(-_TWO_PI), shift(_TWO_PI)),
    ]
    return ChartAtlas("circle", (a, b), tuple(t))


def atlas_section_suite(atlas: ChartAtlas,
                        sections: Optional[dict] = None,
                        cfg: MembershipConfig = DEFAULT_CONFIG) -> dict:
    """End-to-end chart-level exercise of the sheaf operations.

    Per-chart data: compatibility of the given sections across every
    transition (pullback along the coordinate change), a glue/restrict
    round trip inside the first chart, the standard nowhere-dense
    configuration (naturals index, nowhere dense family) with its
    nontrivial member and off-diagonality, and a flabby extension
    within the chart.
    """
    report = {"atlas": atlas.label, "checks": {}}
    report["checks"]["transitions"] = atlas.validate()

    if sections is None:
        x = coord(0)
        from .expr import sin as _sin, cos as _cos
        sections = {c.name: _sin(x) for c in atlas.charts}
        sections_extra = {c.name: _cos(x) for c in atlas.charts}
    else:
        sections_extra = None

    # transition compatibility of the per-chart section expressions
    compat = []
    for t in atlas.transitions:
        frm_expr = sections[t.frm]
        to_expr = sections[t.to]
        pulled = subst(to_expr, list(t.forward))
        fam = SingularityFamily("nd", [], t.domain)
        ideal = family_ideal(fam, NAT)
        r = eq_mod_ideal(embed_smooth(frm_expr, ideal),
                         embed_smooth(pulled, ideal), cfg)
        compat.append({"from": t.frm, "to": t.to, "status": r.status})
        if sections_extra is not None:
            pulled2 = subst(sections_extra[t.to], list(t.forward))
            r2 = eq_mod_ideal(embed_smooth(sections_extra[t.frm], ideal),
                              embed_smooth(pulled2, ideal), cfg)
            compat.append({"from": t.frm, "to": t.to, "status": r2.status})
    report["checks"]["section_compatibility"] = compat

    # flat-domain machinery inside the first chart
    chart = atlas.charts[0]
    Vb = chart.box
    (lo, hi), = Vb.boxes[0].intervals
    third = (hi - lo) / 3
    c1 = OpenSet.interval(lo, lo + 2 * third)
    c2 = OpenSet.interval(lo + third, hi)
    fam = SingularityFamily("nd", [], Vb)
    ideal = family_ideal(fam, NAT)
    T = embed_smooth(sections[chart.name], ideal)
    pou = partition_of_unity(Vb, [c1, c2])
    assignment = SectionAssignment(
        (c1, c2), (restrict(T, c1), restrict(T, c2)), ideal)
    g = glue(assignment, pou, cfg)
    report["checks"]["glue_round_trip"] = {
        "verified": g.verified,
        "restrictions": [s for _, s in g.restriction_checks]}

    mid = (lo + hi) / 2
    member = nontrivial_nd(add(coord(0), const(-mid)), Vb)
    sig = ZeroSet(add(coord(0), const(-mid)), Vb, nowhere_dense=True)
    rmem = check_membership(member, single_ideal(sig, NAT))
    off = off_diagonality_suite(single_ideal(sig, NAT),
                                [ONE, coord(0)], cfg)
    report["checks"]["nowhere_dense_configuration"] = {
        "membership": rmem.status,
        "off_diagonality_refuted": off.all_refuted}

    inner = OpenSet.interval(lo + third, hi - third)
    fam_inner = SingularityFamily("nd", [], inner)
    Ti = embed_smooth(sections[chart.name], family_ideal(fam_inner, NAT))
    fl = flabby_extend(Ti, Vb, cfg=cfg)
    report["checks"]["flabby_extension"] = {
        "restriction_identity": fl.restriction_identity.status}

    statuses = [c["status"] for c in compat]
    report["all_ok"] = (all(s == "verified" for s in statuses)
                        and g.verified and rmem.verified
                        and off.all_refuted and fl.verified)
    return report
