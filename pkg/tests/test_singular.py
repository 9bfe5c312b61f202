from fractions import Fraction

import pytest

from foamalg.domains import OpenSet
from foamalg.expr import ZERO, add, const, coord, mul, sin, to_sexpr
from foamalg.singular import (CountableUnion, DenseEnumerated, EmptySet,
                              FamilyError, FinitePoints, SingularityError,
                              SingularityFamily, ZeroSet, complement_dense,
                              exterior_samples, locally_finitely_additive,
                              rationals_in_unit_interval,
                              singular_set_from_json)

X = coord(0)
V = OpenSet.interval(-1, 1)


class TestSingularSets:
    def test_finite_points_membership(self):
        s = FinitePoints([(0,)], V)
        assert s.contains((0.0,)) and not s.contains((0.5,))
        assert s.is_nowhere_dense

    def test_zero_set_membership_and_flag(self):
        z = ZeroSet(mul(X, add(X, const(-1))), OpenSet.interval(-2, 2))
        assert z.is_nowhere_dense
        assert z.contains((0.0,)) and z.contains((1.0,))
        assert not z.contains((0.5,))

    def test_identically_zero_sigma_rejected(self):
        with pytest.raises(SingularityError):
            ZeroSet(ZERO, V)

    def test_numerically_flat_sigma_not_flagged(self):
        tiny = ZeroSet(mul(const(1e-20), sin(X)), V)
        assert not tiny.is_nowhere_dense

    def test_countable_union_prefix_reading(self):
        parts = [FinitePoints([(i,)], OpenSet.interval(-10, 10))
                 for i in range(4)]
        u = CountableUnion(parts, OpenSet.interval(-10, 10))
        assert len(u.stage(0)) == 1
        assert len(u.stage(2)) == 3
        assert len(u.stage(99)) == 4
        assert u.contains((3.0,)) and not u.contains((4.5,))

    def test_dense_enumerated(self):
        qs = rationals_in_unit_interval(64)
        d = DenseEnumerated([(q,) for q in qs], OpenSet.interval(0, 1),
                            cap=5000)
        assert d.contains((0.5,))
        assert not d.contains((1 / 2 ** 0.5,))
        assert not d.is_nowhere_dense

    def test_restriction(self):
        W = OpenSet.interval(0, 1)
        assert isinstance(FinitePoints([(0,)], V).restrict(W), EmptySet)
        z = ZeroSet(mul(X, add(X, const(-1))), OpenSet.interval(-2, 2))
        zr = z.restrict(OpenSet.interval(Fraction(1, 2), 2))
        assert zr.contains((1.0,)) and not zr.contains((0.0,))

    def test_restrict_composes(self):
        W = OpenSet.interval(0, 1)
        W2 = OpenSet.interval(Fraction(1, 4), Fraction(1, 2))
        s = ZeroSet(mul(X, add(X, const(-1))), V, nowhere_dense=True)
        assert s.restrict(W).restrict(W2) == s.restrict(W2)

    def test_json_round_trip(self):
        sets = [
            EmptySet(V),
            FinitePoints([(0,), (Fraction(1, 2),)], V),
            ZeroSet(mul(X, add(X, const(-1))), V, nowhere_dense=True),
            CountableUnion([FinitePoints([(0,)], V),
                            FinitePoints([(Fraction(1, 2),)], V)], V),
        ]
        for s in sets:
            assert singular_set_from_json(s.to_json(), V) == s


class TestComplementDensity:
    def test_point_set(self):
        rep = complement_dense(FinitePoints([(0,)], V), 16)
        assert rep.ok and len(rep.witnesses) == 16

    def test_dense_enumerated_via_irrational_offsets(self):
        qs = rationals_in_unit_interval(64)
        d = DenseEnumerated([(q,) for q in qs], OpenSet.interval(0, 1),
                            cap=5000)
        rep = complement_dense(d, 16)
        assert rep.ok
        for w in rep.witnesses:
            assert not d.contains(w)

    def test_degenerate_zero_set_fails(self):
        flat = ZeroSet(mul(const(1e-20), sin(X)), V)
        rep = complement_dense(flat, 4)
        assert not rep.ok and rep.failing_cell is not None

    def test_resolution_validated(self):
        with pytest.raises(SingularityError):
            complement_dense(FinitePoints([(0,)], V), 1)


class TestExteriorSamples:
    def test_midpoints_when_free(self):
        pts = exterior_samples(FinitePoints([(0,)], V), V, 8)
        assert len(pts) == 8

    def test_offsets_dodge_enumerated_rationals(self):
        qs = rationals_in_unit_interval(64)
        W = OpenSet.interval(0, 1)
        d = DenseEnumerated([(q,) for q in qs], W, cap=5000)
        pts = exterior_samples(d, W, 32)
        assert len(pts) == 32
        assert all(not d.contains(p) for p in pts)


class TestFamilies:
    def test_nd_join_of_zero_sets_is_product(self):
        fam = SingularityFamily("nd", [], V)
        a = ZeroSet(X, V, nowhere_dense=True)
        b = ZeroSet(add(X, const(-0.5)), V, nowhere_dense=True)
        j = fam.union_join(a, b)
        assert isinstance(j, ZeroSet) and j.is_nowhere_dense
        assert j.contains((0.0,)) and j.contains((0.5,))

    def test_finite_point_join_concatenates(self):
        fam = SingularityFamily("nd", [], V)
        j = fam.union_join(FinitePoints([(0,)], V),
                           FinitePoints([(Fraction(1, 2),)], V))
        assert isinstance(j, FinitePoints) and len(j.points) == 2

    def test_join_with_empty_is_identity(self):
        fam = SingularityFamily("nd", [], V)
        s = FinitePoints([(0,)], V)
        assert fam.union_join(s, EmptySet(V)) == s

    def test_baire_join_stays_countable_union(self):
        fam = SingularityFamily("baire_delta", [], V)
        u1 = CountableUnion([FinitePoints([(0,)], V)], V)
        u2 = CountableUnion([FinitePoints([(Fraction(1, 2),)], V)], V)
        j = fam.union_join(u1, u2)
        assert isinstance(j, CountableUnion) and len(j.parts) == 2
        assert fam.accepts(j)

    def test_nd_generators_accepted_by_baire(self):
        nd_members = [FinitePoints([(0,)], V),
                      ZeroSet(X, V, nowhere_dense=True)]
        bd = SingularityFamily("baire_delta", nd_members, V)
        for g in bd.generators:
            assert complement_dense(g, 8).ok

    def test_dense_generator_rejected_by_nd(self):
        qs = rationals_in_unit_interval(8)
        W = OpenSet.interval(0, 1)
        d = DenseEnumerated([(q,) for q in qs], W, cap=100)
        with pytest.raises(FamilyError):
            SingularityFamily("nd", [d], W)

    def test_custom_family_join_restrictions(self):
        a = FinitePoints([(0,)], V)
        b = FinitePoints([(Fraction(1, 2),)], V)
        fam = SingularityFamily("custom", [a, b], V)
        with pytest.raises(FamilyError):
            fam.union_join(a, b)

    def test_restrict_family(self):
        fam = SingularityFamily(
            "nd", [FinitePoints([(0,)], V),
                   ZeroSet(mul(X, add(X, const(-1))), V,
                           nowhere_dense=True)], V)
        W = OpenSet.interval(0, 1)
        r = fam.restrict(W)
        assert r.domain == W
        assert isinstance(r.generators[0], EmptySet)
        # restriction composes structurally
        W2 = OpenSet.interval(Fraction(1, 4), Fraction(1, 2))
        assert fam.restrict(W).restrict(W2) == fam.restrict(W2)

    def test_restrict_requires_containment(self):
        fam = SingularityFamily("nd", [], V)
        with pytest.raises(FamilyError):
            fam.restrict(OpenSet.interval(0, 5))


class TestLocallyFinitelyAdditive:
    def test_integer_points_pass_with_half_radius(self):
        V10 = OpenSet.interval(-10, 10)
        fam = SingularityFamily("nd", [], V10)
        sig = [FinitePoints([(l,)], V10) for l in range(20)]
        rep = locally_finitely_additive(fam, sig, V10, 16)
        assert rep.passed
        assert all(w.delta == 0.5 for w in rep.witnesses)
        assert all(len(w.indices) <= 2 for w in rep.witnesses)
        assert rep.union_member is not None

    def test_finite_list_of_identical_points(self):
        fam = SingularityFamily("nd", [], V)
        sig = [FinitePoints([(0,)], V) for _ in range(5)]
        rep = locally_finitely_additive(fam, sig, V, 8)
        assert rep.passed

    def test_accumulation_point_reported_inconclusive(self):
        fam = SingularityFamily("nd", [], V)
        sig = [FinitePoints([(Fraction(1, l + 1),)], V) for l in range(20)]
        rep = locally_finitely_additive(fam, sig, V, 15,
                                        accumulation_points=[(0.0,)])
        assert not rep.passed
        assert rep.inconclusive_points == ((0.0,),)
        # every other grid point still has a radius witness
        assert len(rep.witnesses) == 14
