import random

import pytest

from foamalg.expr import (add, comp, const, coord, evaluate, glue, mul, pow_)


def central_diff(e, x, axis, h=1e-4):
    """Finite-difference oracle for single-axis derivatives."""
    xp = list(x)
    xm = list(x)
    xp[axis] += h
    xm[axis] -= h
    return (evaluate(e, xp) - evaluate(e, xm)) / (2 * h)


def simpson(f, lo, hi, n=2000):
    """Composite Simpson oracle, independent of the package quadrature."""
    if n % 2:
        n += 1
    h = (hi - lo) / n
    total = f((lo,)) + f((hi,))
    for i in range(1, n):
        total += (4 if i % 2 else 2) * f((lo + i * h,))
    return total * h / 3


def random_expr(rng: random.Random, dim: int, depth: int):
    """Random member of the node language, bounded depth, tame values."""
    if depth <= 0:
        k = rng.randrange(3)
        if k == 0:
            return const(rng.choice([-2, -1, 1, 2, 3]))
        if k == 1:
            return const(round(rng.uniform(-1.5, 1.5), 3))
        return coord(rng.randrange(dim))
    k = rng.randrange(7)
    if k == 0:
        return add(random_expr(rng, dim, depth - 1),
                   random_expr(rng, dim, depth - 1))
    if k == 1:
        return mul(random_expr(rng, dim, depth - 1),
                   random_expr(rng, dim, depth - 1))
    if k == 2:
        return pow_(random_expr(rng, dim, depth - 1), rng.randrange(2, 4))
    if k == 3:
        return comp(rng.choice(["sin", "cos"]),
                    random_expr(rng, dim, depth - 1))
    if k == 4:
        # keep exp arguments small so values stay finite and tame
        return comp("exp", mul(const(round(rng.uniform(-0.4, 0.4), 2)),
                               random_expr(rng, dim, depth - 1)))
    if k == 5:
        return glue([rng.choice([1, 2])], rng.randrange(2),
                    random_expr(rng, dim, depth - 1))
    return coord(rng.randrange(dim))


@pytest.fixture
def rng():
    return random.Random(0)
