"""Right-directed index orders and cofinal embeddings.

Two concrete orders are supported: the natural numbers with their total
order, and pairs of naturals ordered componentwise ((l,k) <= (l',k')
iff l <= l' and k <= k').  Both are right directed: any two elements
have a join (max, componentwise max).  These are the only orders the
constructive scope needs; uncountable index sets stay out of scope.

Elements are plain ints / int pairs; values here are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Tuple

NatElem = int
PairElem = Tuple[int, int]


class OrderError(ValueError):
    pass


# probe offsets above a witness, one canonical list per order kind
_NAT_OFFSETS = tuple(range(64))
_PAIR_OFFSETS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 2),
                 (3, 3), (2, 1), (1, 2), (3, 0), (0, 3), (4, 4), (3, 2),
                 (2, 3), (5, 5))


@dataclass(frozen=True)
class IndexOrder:
    """A right-directed partial order usable as an index set."""

    kind: str  # "nat" | "nat_pair"

    def validate(self, a):
        if self.kind == "nat":
            if not (isinstance(a, int) and a >= 0):
                raise OrderError(f"{a!r} is not a natural number")
        else:
            if not (isinstance(a, tuple) and len(a) == 2
                    and all(isinstance(c, int) and c >= 0 for c in a)):
                raise OrderError(f"{a!r} is not a pair of naturals")
        return a

    def leq(self, a, b) -> bool:
        if self.kind == "nat":
            return a <= b
        return a[0] <= b[0] and a[1] <= b[1]

    def join(self, a, b):
        """Least upper bound: max for naturals, componentwise max for
        pairs.  Witnesses the right-directedness used by ideal closure
        under addition."""
        if self.kind == "nat":
            return max(a, b)
        return (max(a[0], b[0]), max(a[1], b[1]))

    def least(self):
        return 0 if self.kind == "nat" else (0, 0)

    def probes_from(self, start, count: int):
        """Deterministic elements >= start used when certifying an
        asymptotic-vanishing witness."""
        self.validate(start)
        if self.kind == "nat":
            return tuple(start + o for o in _NAT_OFFSETS[:count])
        return tuple((start[0] + o[0], start[1] + o[1])
                     for o in _PAIR_OFFSETS[:count])

    def witness_candidates(self, count: int):
        """Canonical witness search sequence when a sequence carries no
        analytic witness (the diagonal is cofinal in both orders)."""
        if self.kind == "nat":
            return tuple(range(count))
        return tuple((i, i) for i in range(count))

    def element_to_json(self, a):
        return a if self.kind == "nat" else [a[0], a[1]]

    def element_from_json(self, data):
        if self.kind == "nat":
            return self.validate(int(data))
        return self.validate((int(data[0]), int(data[1])))

    def to_json(self):
        return {"order": self.kind}

    @staticmethod
    def from_json(data) -> "IndexOrder":
        kind = data["order"]
        if kind not in ("nat", "nat_pair"):
            raise OrderError(f"unknown order {kind!r}")
        return IndexOrder(kind)


NAT = IndexOrder("nat")
NAT_PAIR = IndexOrder("nat_pair")


@dataclass(frozen=True)
class CofinalEmbedding:
    """Order-preserving injection whose image reaches above every
    element of the target; ``dominate`` maps a target element to a
    source element whose image dominates it."""

    source: IndexOrder
    target: IndexOrder
    map: Callable = field(compare=False)
    dominate: Callable = field(compare=False)
    name: str = "embedding"

    def check_on(self, pairs) -> bool:
        """Sampled verification of order preservation and cofinality."""
        for a, b in pairs:
            if self.source.leq(a, b) and not self.target.leq(self.map(a),
                                                             self.map(b)):
                return False
        for a, b in pairs:
            for t in (self.map(a), self.map(b)):
                if not self.target.leq(t, self.map(self.dominate(t))):
                    return False
        return True


def diagonal_embedding() -> CofinalEmbedding:
    """l |-> (l, l); every (l, k) is dominated by the image of
    max(l, k)."""
    return CofinalEmbedding(
        source=NAT, target=NAT_PAIR,
        map=lambda l: (l, l),
        dominate=lambda lk: max(lk[0], lk[1]),
        name="diagonal")


def identity_embedding(order: IndexOrder) -> CofinalEmbedding:
    return CofinalEmbedding(
        source=order, target=order,
        map=lambda a: a,
        dominate=lambda a: a,
        name="identity")
