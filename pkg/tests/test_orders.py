import random

import pytest

from foamalg.domains import OpenSet
from foamalg.expr import ZERO, coord, sin
from foamalg.foam import diagonal, rho_restrict
from foamalg.orders import (NAT, NAT_PAIR, OrderError, diagonal_embedding,
                            identity_embedding)


def _random_elem(rng, order):
    if order.kind == "nat":
        return rng.randrange(50)
    return (rng.randrange(50), rng.randrange(50))


@pytest.mark.parametrize("order", [NAT, NAT_PAIR], ids=["nat", "nat_pair"])
def test_partial_order_axioms_on_random_triples(order, rng):
    for _ in range(200):
        a, b, c = (_random_elem(rng, order) for _ in range(3))
        assert order.leq(a, a)
        if order.leq(a, b) and order.leq(b, a):
            assert a == b
        if order.leq(a, b) and order.leq(b, c):
            assert order.leq(a, c)
        j = order.join(a, b)
        assert order.leq(a, j) and order.leq(b, j)


def test_join_examples():
    assert NAT.join(3, 5) == 5
    assert NAT.join(4, 4) == 4
    assert NAT_PAIR.join((2, 7), (5, 1)) == (5, 7)


def test_element_validation():
    with pytest.raises(OrderError):
        NAT.validate(-1)
    with pytest.raises(OrderError):
        NAT_PAIR.validate((1,))
    with pytest.raises(OrderError):
        NAT_PAIR.validate(3)


def test_probes_start_at_witness():
    ps = NAT.probes_from(5, 8)
    assert ps[0] == 5 and len(ps) == 8
    assert all(NAT.leq(5, p) for p in ps)
    pp = NAT_PAIR.probes_from((2, 3), 8)
    assert pp[0] == (2, 3) and len(pp) == 8
    assert all(NAT_PAIR.leq((2, 3), p) for p in pp)


def test_diagonal_embedding():
    emb = diagonal_embedding()
    assert emb.map(3) == (3, 3)
    assert emb.dominate((2, 9)) == 9
    assert NAT_PAIR.leq((2, 9), emb.map(emb.dominate((2, 9))))
    assert NAT_PAIR.leq(emb.map(1), emb.map(4))


def test_embedding_sampled_check(rng):
    emb = diagonal_embedding()
    pairs = [(_random_elem(rng, NAT), _random_elem(rng, NAT))
             for _ in range(50)]
    assert emb.check_on(pairs)
    # dominate probes target elements too
    tpairs = [((1, 7), (4, 2)), ((0, 0), (9, 9))]
    for a, b in tpairs:
        assert NAT_PAIR.leq(a, emb.map(emb.dominate(a)))
        assert NAT_PAIR.leq(b, emb.map(emb.dominate(b)))


def test_json_round_trip():
    from foamalg.orders import IndexOrder
    assert IndexOrder.from_json(NAT.to_json()) == NAT
    assert IndexOrder.from_json(NAT_PAIR.to_json()) == NAT_PAIR
    assert NAT_PAIR.element_from_json(
        NAT_PAIR.element_to_json((3, 4))) == (3, 4)


class TestRhoRestrict:
    def test_constant_sequence_pulls_back_to_constant(self):
        V = OpenSet.interval(-1, 1)
        s = diagonal(sin(coord(0)), NAT_PAIR, V)
        r = rho_restrict(diagonal_embedding(), s)
        assert r.order == NAT
        for l in (0, 2, 5):
            assert r.term(l) == s.term((l, l))

    def test_pointwise_definition_ignores_off_image(self):
        V = OpenSet.interval(-1, 1)
        x = coord(0)

        def t1(lk):
            return x if lk[0] == lk[1] else ZERO

        def t2(lk):
            return x if lk[0] == lk[1] else sin(x)

        from foamalg.foam import FoamSequence
        a = FoamSequence(NAT_PAIR, V, t1)
        b = FoamSequence(NAT_PAIR, V, t2)
        emb = diagonal_embedding()
        ra, rb = rho_restrict(emb, a), rho_restrict(emb, b)
        for l in range(6):
            assert ra.term(l) == rb.term(l)

    def test_algebra_homomorphism_at_sequence_level(self, rng):
        V = OpenSet.interval(-1, 1)
        x = coord(0)
        from foamalg.foam import FoamSequence
        emb = diagonal_embedding()
        a = FoamSequence(NAT_PAIR, V, lambda lk: x ** (1 + lk[0] % 3))
        b = FoamSequence(NAT_PAIR, V, lambda lk: sin(x) * (1 + lk[1]))
        for l in (0, 1, 4):
            assert rho_restrict(emb, a + b).term(l) == \
                (rho_restrict(emb, a) + rho_restrict(emb, b)).term(l)
            assert rho_restrict(emb, a * b).term(l) == \
                (rho_restrict(emb, a) * rho_restrict(emb, b)).term(l)

    def test_identity_embedding(self):
        V = OpenSet.interval(-1, 1)
        s = diagonal(coord(0), NAT, V)
        r = rho_restrict(identity_embedding(NAT), s)
        assert r.term(3) == s.term(3)
