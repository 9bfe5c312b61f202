import random
from fractions import Fraction

import pytest

from foamalg.domains import OpenSet
from foamalg.expr import (ONE, ZERO, add, const, coord, evaluate,
                          eval_with_certificate, is_hard_zero_at, mul, pow_,
                          sin, to_sexpr)
from foamalg.foam import (FoamError, FoamSequence, GenFunction,
                          IdealMismatchError, MembershipConfig,
                          certificate_transfer, check_membership, diagonal,
                          embed_smooth, eq_mod_ideal, family_ideal,
                          foam_to_multifoam, nontrivial_baire, nontrivial_nd,
                          off_diagonality_suite, rho_restrict, single_ideal,
                          zero_sequence)
from foamalg.orders import NAT, NAT_PAIR, diagonal_embedding
from foamalg.singular import (CountableUnion, DenseEnumerated, EmptySet,
                              FinitePoints, SingularityFamily, ZeroSet,
                              rationals_in_unit_interval)

X = coord(0)
V = OpenSet.interval(-1, 1)
SIGMA0 = ZeroSet(X, V, nowhere_dense=True)
IDEAL0 = single_ideal(SIGMA0, NAT)


def member_at_origin(domain=V):
    return nontrivial_nd(X, domain)


def as_genfunction(seq, ideal):
    return GenFunction(FoamSequence(seq.order, seq.domain, seq.term,
                                    descriptor=seq.descriptor,
                                    witness_hint=seq.witness_hint,
                                    sigma_hints=seq.sigma_hints), ideal)


class TestMembership:
    def test_plateau_member_certifies_structurally(self):
        r = check_membership(member_at_origin(), IDEAL0)
        assert r.verified
        cert = r.certificate
        assert cert.all_structural
        assert len(cert.points) == 32
        assert all(not SIGMA0.contains(p) for p in cert.points)

    def test_witnesses_scale_with_distance(self):
        r = check_membership(member_at_origin(), IDEAL0)
        by_point = dict(zip(r.certificate.points, r.certificate.witnesses))
        # closer to the singular point needs a later index
        assert by_point[(0.03125,)] > by_point[(0.96875,)]

    def test_diagonal_unit_refuted(self):
        r = check_membership(diagonal(ONE, NAT, V), IDEAL0)
        assert r.refuted
        a = r.refutation.attempts[0]
        assert a.value == 1.0
        # refutation lists a failing probe for every witness tried
        assert len(r.refutation.attempts) == 8

    def test_zero_sequence_certifies(self):
        r = check_membership(zero_sequence(NAT, V), IDEAL0)
        assert r.verified and r.certificate.all_structural

    def test_two_root_zero_set(self):
        W = OpenSet.interval(-2, 2)
        sigma = mul(X, add(X, const(-1)))
        w = nontrivial_nd(sigma, W)
        r = check_membership(w, single_ideal(ZeroSet(sigma, W,
                                                     nowhere_dense=True)))
        assert r.verified and r.certificate.all_structural

    def test_caps_validated(self):
        with pytest.raises(FoamError):
            check_membership(member_at_origin(), IDEAL0,
                             MembershipConfig(probe_cap=0))

    def test_order_mismatch_rejected(self):
        with pytest.raises(FoamError):
            check_membership(diagonal(ONE, NAT_PAIR, V), IDEAL0)

    def test_certificate_json(self):
        r = check_membership(member_at_origin(), IDEAL0)
        data = r.to_json(NAT)
        assert data["status"] == "verified"
        assert data["P"] == 4 and data["probes"] == 8
        assert len(data["sample_points"]) == len(data["witnesses"])


class TestNontrivialNd:
    def test_value_one_on_zero_set(self):
        w = member_at_origin()
        for l in range(9):
            v = evaluate(w.term(l), (0.0,))
            assert v == 1.0 or abs(v - 1.0) <= 1e-12

    def test_vanishes_off_support(self):
        w = member_at_origin()
        assert is_hard_zero_at(w.term(1), (0.9,))

    def test_identically_zero_sigma_rejected(self):
        with pytest.raises(FoamError):
            nontrivial_nd(ZERO, V)

    def test_flat_sigma_rejected(self):
        with pytest.raises(FoamError):
            nontrivial_nd(mul(const(1e-20), sin(X)), V)


class TestNontrivialBaire:
    @pytest.fixture(scope="class")
    def setup(self):
        W = OpenSet.interval(0, 1)
        qs = rationals_in_unit_interval(8)
        stages = [FinitePoints([(q,) for q in qs[:l + 1]], W)
                  for l in range(8)]
        seq = nontrivial_baire(stages, W)
        fam = SingularityFamily("baire_delta",
                                [CountableUnion(stages, W)], W)
        return W, qs, stages, seq, fam

    def test_membership_over_pair_order(self, setup):
        W, qs, stages, seq, fam = setup
        r = check_membership(seq, family_ideal(fam, NAT_PAIR))
        assert r.verified and r.certificate.all_structural

    def test_value_one_on_stages(self, setup):
        W, qs, stages, seq, fam = setup
        for l in (0, 3, 7):
            for q in qs[:l + 1]:
                v = evaluate(seq.term((l, 2)), (float(q),))
                assert v == 1.0 or abs(v - 1.0) <= 1e-12

    def test_early_stage_vanishes_far_away(self, setup):
        W, qs, stages, seq, fam = setup
        # far from 1/2, stage 0 terms die quickly in k
        assert is_hard_zero_at(seq.term((0, 9)), (0.9,))

    def test_non_increasing_input_repaired(self):
        W = OpenSet.interval(0, 1)
        stages = [FinitePoints([(Fraction(1, 2),)], W),
                  FinitePoints([(Fraction(1, 3),)], W)]
        seq = nontrivial_baire(stages, W)
        assert seq.notes
        # stage 1 covers both points through the prefix union
        v = evaluate(seq.term((1, 3)), (0.5,))
        assert v == 1.0 or abs(v - 1.0) <= 1e-12


class TestQuotientAlgebra:
    def test_embedding_of_zero_and_unit(self):
        z = embed_smooth(ZERO, IDEAL0)
        r = check_membership(z.rep, IDEAL0)
        assert r.verified
        u = embed_smooth(ONE, IDEAL0)
        assert eq_mod_ideal(u, u).verified

    def test_partition_of_one_identity(self):
        a = embed_smooth(X, IDEAL0)
        b = embed_smooth(const(1) - X, IDEAL0)
        s = a + b
        assert s.rep.term(0) == ONE

    def test_product_of_diagonals(self):
        a = embed_smooth(X, IDEAL0)
        b = embed_smooth(sin(X), IDEAL0)
        assert (a * b).rep.term(2) == mul(X, sin(X))

    def test_scalar_and_subtraction(self):
        a = embed_smooth(X, IDEAL0)
        assert (2 * a).rep.term(0) == mul(const(2), X)
        assert (a - a).rep.term(1) == ZERO

    def test_ideal_mismatch_raises(self):
        other = single_ideal(FinitePoints([(Fraction(1, 2),)], V), NAT)
        with pytest.raises(IdealMismatchError):
            embed_smooth(X, IDEAL0) + embed_smooth(X, other)

    def test_eq_mod_ideal_trivial_and_shifted(self):
        T = embed_smooth(sin(X), IDEAL0)
        assert eq_mod_ideal(T, T).verified
        Tw = as_genfunction(member_at_origin(), IDEAL0)
        assert eq_mod_ideal(T + Tw, T).verified

    def test_eq_mod_ideal_refuted(self):
        u = embed_smooth(ONE, IDEAL0)
        z = embed_smooth(ZERO, IDEAL0)
        r = eq_mod_ideal(u, z)
        assert r.refuted


class TestDerivation:
    def test_diagonal_derivative(self):
        T = embed_smooth(pow_(X, 3), IDEAL0)
        assert T.dp((1,)).rep.term(0) == mul(const(3), pow_(X, 2))

    def test_zero_multiindex_is_identity(self):
        T = embed_smooth(sin(X), IDEAL0)
        assert T.dp((0,)) is T

    def test_member_derivative_recertifies(self):
        w = member_at_origin()
        for p, pc in (((1,), 3), ((2,), 2)):
            r = check_membership(w.dp(p), IDEAL0, MembershipConfig(p_cap=pc))
            assert r.verified and r.certificate.all_structural

    def test_leibniz_is_termwise_exact(self):
        T = embed_smooth(sin(X), IDEAL0)
        U = embed_smooth(pow_(X, 2), IDEAL0)
        lhs = (T * U).dp((1,))
        rhs = T.dp((1,)) * U + T * U.dp((1,))
        diff = lhs.rep - rhs.rep
        for l in (0, 1, 5):
            assert diff.term(l) == ZERO


class TestIdealLaws:
    def test_closure_under_addition_with_joined_witnesses(self):
        w1 = member_at_origin()
        w2 = nontrivial_nd(X, V)
        s = w1 + w2
        x = (0.25,)
        assert s.witness_hint(x) == NAT.join(w1.witness_hint(x),
                                             w2.witness_hint(x))
        r = check_membership(s, IDEAL0)
        assert r.verified and r.certificate.all_structural

    def test_absorption_keeps_witnesses(self):
        w = member_at_origin()
        s = diagonal(sin(mul(const(3), X)), NAT, V)
        prod = s * w
        x = (0.125,)
        assert prod.witness_hint(x) == w.witness_hint(x)
        r = check_membership(prod, IDEAL0)
        assert r.verified and r.certificate.all_structural

    def test_monotonicity_certificate_transfer(self):
        w = member_at_origin()
        cert = check_membership(w, IDEAL0).certificate
        larger = ZeroSet(mul(X, add(X, const(Fraction(-1, 2)))), V,
                         nowhere_dense=True)
        moved = certificate_transfer(cert, larger)
        assert moved.sigma == larger
        assert all(not larger.contains(p) for p in moved.points)
        # transferred witnesses re-verify against the larger set
        r = check_membership(w, single_ideal(larger, NAT))
        assert r.verified


class TestMorphisms:
    def test_foam_to_multifoam_relabels(self):
        fam = SingularityFamily("nd", [SIGMA0], V)
        T = as_genfunction(member_at_origin(), IDEAL0)
        Tm = foam_to_multifoam(T, fam)
        assert Tm.ideal.mode == "family"
        assert check_membership(Tm.rep, Tm.ideal).verified

    def test_image_of_diagonal(self):
        fam = SingularityFamily("nd", [SIGMA0], V)
        T = embed_smooth(sin(X), IDEAL0)
        Tm = foam_to_multifoam(T, fam)
        expect = embed_smooth(sin(X), family_ideal(fam, NAT))
        assert eq_mod_ideal(Tm, expect).verified

    def test_not_dominated_rejected(self):
        W = OpenSet.interval(0, 1)
        fam = SingularityFamily(
            "custom", [FinitePoints([(Fraction(1, 2),)], W)], W)
        sig = FinitePoints([(Fraction(1, 3),)], W)
        T = embed_smooth(ONE, single_ideal(sig, NAT))
        with pytest.raises(FoamError):
            foam_to_multifoam(T, fam)

    def test_morphism_commutes_with_operations(self):
        fam = SingularityFamily("nd", [SIGMA0], V)
        famideal = family_ideal(fam, NAT)
        a = embed_smooth(X, IDEAL0)
        b = embed_smooth(sin(X), IDEAL0)
        fa, fb = foam_to_multifoam(a, fam), foam_to_multifoam(b, fam)
        assert eq_mod_ideal(foam_to_multifoam(a + b, fam), fa + fb).verified
        assert eq_mod_ideal(foam_to_multifoam(a * b, fam), fa * fb).verified
        assert eq_mod_ideal(foam_to_multifoam(a.dp((1,)), fam),
                            fa.dp((1,))).verified


class TestRhoCompatibility:
    def test_baire_member_restricts_to_nat_member(self):
        W = OpenSet.interval(0, 1)
        qs = rationals_in_unit_interval(8)
        stages = [FinitePoints([(q,) for q in qs[:l + 1]], W)
                  for l in range(8)]
        wb = nontrivial_baire(stages, W)
        wr = rho_restrict(diagonal_embedding(), wb)
        ideal = single_ideal(CountableUnion(stages, W), NAT, verify=False)
        r = check_membership(wr, ideal)
        assert r.verified and r.certificate.all_structural

    def test_classes_commute_with_restriction(self, rng):
        emb = diagonal_embedding()
        pool = [ONE, X, pow_(X, 2), sin(X)]
        ideal_pair = single_ideal(SIGMA0, NAT_PAIR)
        ideal_nat = single_ideal(SIGMA0, NAT)
        for _ in range(10):
            a = diagonal(rng.choice(pool), NAT_PAIR, V)
            b = diagonal(rng.choice(pool), NAT_PAIR, V)
            left = rho_restrict(emb, a + b)
            right = rho_restrict(emb, a) + rho_restrict(emb, b)
            assert eq_mod_ideal(GenFunction(left, ideal_nat),
                                GenFunction(right, ideal_nat)).verified
            leftm = rho_restrict(emb, a * b)
            rightm = rho_restrict(emb, a) * rho_restrict(emb, b)
            for l in (0, 3):
                assert leftm.term(l) == rightm.term(l)


class TestOffDiagonality:
    def test_single_point_ideal(self):
        rep = off_diagonality_suite(IDEAL0, [ONE, X, sin(mul(const(3), X))])
        assert rep.all_refuted

    def test_dense_enumerated_ideal(self):
        W = OpenSet.interval(0, 1)
        qs = rationals_in_unit_interval(64)
        d = DenseEnumerated([(q,) for q in qs], W, cap=5000)
        ideal = single_ideal(d, NAT)
        pi = const(3.141592653589793)
        rep = off_diagonality_suite(ideal, [sin(mul(pi, X)), ONE])
        assert rep.all_refuted
        # the refuting samples dodge the enumerated rationals
        for e in rep.entries:
            assert not d.contains(e.point)

    def test_zero_rejected(self):
        with pytest.raises(FoamError):
            off_diagonality_suite(IDEAL0, [X - X])
