"""Symbolic smooth functions on open subsets of R^n.

The expression language is a small closed node set: constants,
coordinates, n-ary sums and products, integer powers, the analytic
unaries exp/sin/cos, and a non-analytic glue primitive

    t  |->  r(t) * exp(-1/t)   for t > 0,      0   for t <= 0,

where r is a rational function of t whose only pole sits at t = 0.
The glue primitive is what makes exact bump, step and plateau
constructions possible; everything else is ordinary computer algebra.
The set is closed under single-axis differentiation: the derivative of
a glue node is again a glue node, with r replaced by r' + r/t^2.

Expressions are immutable and canonicalised on construction (constant
folding, flattening, like-term collection, deterministic child order),
so structural equality is plain ``==``.  Evaluation tracks *hard
zeros*: values that are exactly zero because some subterm is
structurally zero at the point (a glue primitive left of its seam, a
coordinate hitting 0.0, ...), as opposed to values that merely round
to zero.  Certificate checking elsewhere leans on that distinction.

All values here are immutable after construction and evaluation and
differentiation are pure, so concurrent readers are safe.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, float, Fraction]

_RANK_CONST = 0
_RANK_COORD = 1
_RANK_ADD = 2
_RANK_MUL = 3
_RANK_POW = 4
_RANK_COMP = 5
_RANK_GLUE = 6

_FN_INDEX = {"exp": 0, "sin": 1, "cos": 2}


class ExprError(ValueError):
    """Malformed expression construction."""


class EvalDomainError(ArithmeticError):
    """Evaluation left the domain (division by zero, overflow)."""


class DimensionError(ExprError):
    """Point dimension does not cover the axes used by an expression."""


def _as_fraction_pair(v) -> tuple:
    f = Fraction(v)
    return (f.numerator, f.denominator)


class SmoothExpr:
    """Base node.  Subclasses are value objects; use the module-level
    constructors (:func:`const`, :func:`coord`, :func:`add`, ...) which
    canonicalise on the way in."""

    __slots__ = ("key", "_hash", "max_axis")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SmoothExpr):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return to_sexpr(self)

    # -- operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(_MINUS_ONE, _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(_MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __neg__(self):
        return mul(_MINUS_ONE, self)

    def __pow__(self, n):
        return pow_(self, n)

    def __truediv__(self, other):
        return mul(self, pow_(_coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(_coerce(other), pow_(self, -1))

    # -- subclass API ----------------------------------------------------
    def _ev(self, x):
        raise NotImplementedError

    def _d(self, axis: int) -> "SmoothExpr":
        raise NotImplementedError

    def children(self) -> tuple:
        return ()


class Const(SmoothExpr):
    __slots__ = ("value", "fvalue")

    def __init__(self, value):
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ExprError("constants must be finite")
            if value.is_integer():
                value = Fraction(int(value))
        elif isinstance(value, int):
            value = Fraction(value)
        elif not isinstance(value, Fraction):
            raise ExprError(f"bad constant {value!r}")
        self.value = value
        self.fvalue = float(value)
        isf = 1 if isinstance(value, float) else 0
        self.key = (_RANK_CONST, _as_fraction_pair(value), isf)
        self._hash = hash(self.key)
        self.max_axis = -1

    def _ev(self, x):
        return self.fvalue, self.value == 0

    def _d(self, axis):
        return ZERO


class Coord(SmoothExpr):
    __slots__ = ("axis",)

    def __init__(self, axis: int):
        if not isinstance(axis, int) or axis < 0:
            raise ExprError(f"bad axis {axis!r}")
        self.axis = axis
        self.key = (_RANK_COORD, axis)
        self._hash = hash(self.key)
        self.max_axis = axis

    def _ev(self, x):
        v = x[self.axis]
        return v, v == 0.0

    def _d(self, axis):
        return ONE if axis == self.axis else ZERO


class Add(SmoothExpr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        # raw constructor: use add()
        self.terms = terms
        self.key = (_RANK_ADD,) + tuple(t.key for t in terms)
        self._hash = hash((_RANK_ADD,) + tuple(t._hash for t in terms))
        self.max_axis = max(t.max_axis for t in terms)

    def _ev(self, x):
        vals = []
        hard = True
        for t in self.terms:
            v, h = t._ev(x)
            vals.append(v)
            hard = hard and h
        return math.fsum(vals), hard

    def _d(self, axis):
        return add(*(derive1(t, axis) for t in self.terms))

    def children(self):
        return self.terms


class Mul(SmoothExpr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        # raw constructor: use mul()
        self.factors = factors
        self.key = (_RANK_MUL,) + tuple(f.key for f in factors)
        self._hash = hash((_RANK_MUL,) + tuple(f._hash for f in factors))
        self.max_axis = max(f.max_axis for f in factors)

    def _ev(self, x):
        vals = []
        hard = False
        for f in self.factors:
            v, h = f._ev(x)
            vals.append(v)
            hard = hard or h
        if hard:
            return 0.0, True
        return math.prod(vals), False

    def _d(self, axis):
        terms = []
        fs = self.factors
        for i, f in enumerate(fs):
            df = derive1(f, axis)
            if df is ZERO or df == ZERO:
                continue
            terms.append(mul(*fs[:i], df, *fs[i + 1:]))
        return add(*terms)

    def children(self):
        return self.factors


class Pow(SmoothExpr):
    """Integer power.  Negative exponents are reciprocals and are only
    evaluated where the base is nonzero; every construction in this
    package that uses them keeps the base globally positive."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        # raw constructor: use pow_()
        self.base = base
        self.exponent = exponent
        self.key = (_RANK_POW, base.key, exponent)
        self._hash = hash((_RANK_POW, base._hash, exponent))
        self.max_axis = base.max_axis

    def _ev(self, x):
        v, h = self.base._ev(x)
        n = self.exponent
        if n < 0:
            if v == 0.0:
                raise EvalDomainError("zero base with negative exponent")
            try:
                r = v ** n
            except OverflowError as e:  # pragma: no cover - extreme inputs
                raise EvalDomainError(str(e))
            return r, False
        return v ** n, h

    def _d(self, axis):
        db = derive1(self.base, axis)
        return mul(const(self.exponent), pow_(self.base, self.exponent - 1), db)

    def children(self):
        return (self.base,)


class Comp1(SmoothExpr):
    __slots__ = ("fn", "arg")

    def __init__(self, fn, arg):
        # raw constructor: use comp()
        self.fn = fn
        self.arg = arg
        self.key = (_RANK_COMP, _FN_INDEX[fn], arg.key)
        self._hash = hash((_RANK_COMP, _FN_INDEX[fn], arg._hash))
        self.max_axis = arg.max_axis

    def _ev(self, x):
        v, h = self.arg._ev(x)
        if self.fn == "exp":
            try:
                return math.exp(v), False
            except OverflowError as e:
                raise EvalDomainError(str(e))
        if self.fn == "sin":
            return math.sin(v), h
        return math.cos(v), False

    def _d(self, axis):
        da = derive1(self.arg, axis)
        if self.fn == "exp":
            return mul(self, da)
        if self.fn == "sin":
            return mul(comp("cos", self.arg), da)
        return mul(_MINUS_ONE, comp("sin", self.arg), da)

    def children(self):
        return (self.arg,)


class Glue(SmoothExpr):
    """r(arg) * exp(-1/arg) for arg > 0, identically 0 for arg <= 0.

    ``num`` holds the numerator coefficients of r (low order first,
    exact rationals) and ``pole`` the order of the pole at 0, i.e.
    r(t) = num(t) / t**pole.  The stored numerator is primitive with
    positive lowest coefficient; overall rational content is factored
    out by the :func:`glue` constructor.
    """

    __slots__ = ("num", "pole", "arg", "_fnum")

    def __init__(self, num, pole, arg):
        # raw constructor: use glue()
        self.num = num
        self.pole = pole
        self.arg = arg
        self._fnum = tuple(float(c) for c in num)
        self.key = (_RANK_GLUE, tuple(_as_fraction_pair(c) for c in num),
                    pole, arg.key)
        self._hash = hash((_RANK_GLUE, tuple(num), pole, arg._hash))
        self.max_axis = arg.max_axis

    def _ev(self, x):
        t, _ = self.arg._ev(x)
        if t <= 0.0:
            return 0.0, True
        decay = math.exp(-1.0 / t)
        if decay == 0.0:
            # exp underflowed; r(t) is bounded by t**-pole here and the
            # true magnitude is far below double precision resolution
            return 0.0, False
        acc = 0.0
        for c in reversed(self._fnum):
            acc = acc * t + c
        return acc / (t ** self.pole) * decay, False

    def _d(self, axis):
        da = derive1(self.arg, axis)
        n = self.num
        k = self.pole
        # d/dt [n(t)/t^k * e^(-1/t)] = (n'(t) t^2 - k n(t) t + n(t)) / t^(k+2) * e^(-1/t)
        dn = _poly_derive(n)
        num2 = _poly_add(_poly_shift(dn, 2),
                         _poly_scale(_poly_shift(n, 1), Fraction(-k)),
                         n)
        return mul(glue(num2, k + 2, self.arg), da)

    def children(self):
        return (self.arg,)


# ---------------------------------------------------------------------------
# polynomial helpers on coefficient tuples (low order first, Fractions)

def _poly_derive(c):
    return tuple(c[i] * i for i in range(1, len(c)))


def _poly_shift(c, j):
    return (Fraction(0),) * j + tuple(c)


def _poly_scale(c, s):
    return tuple(x * s for x in c)


def _poly_add(*polys):
    n = max((len(p) for p in polys), default=0)
    return tuple(sum((p[i] for p in polys if i < len(p)), Fraction(0))
                 for i in range(n))


# ---------------------------------------------------------------------------
# canonicalising constructors

def _coerce(v) -> SmoothExpr:
    if isinstance(v, SmoothExpr):
        return v
    if isinstance(v, (int, float, Fraction)):
        return const(v)
    raise ExprError(f"cannot use {v!r} in an expression")


def const(v) -> SmoothExpr:
    return Const(v)


def coord(axis: int) -> SmoothExpr:
    return Coord(axis)


def _split_coeff(t: SmoothExpr):
    """Split a canonical non-Const term into (coefficient, rest)."""
    if isinstance(t, Mul) and isinstance(t.factors[0], Const):
        rest = t.factors[1:]
        r = rest[0] if len(rest) == 1 else Mul(rest)
        return t.factors[0].value, r
    return Fraction(1), t


def add(*terms) -> SmoothExpr:
    flat = []
    stack = [_coerce(t) for t in reversed(terms)]
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(reversed(t.terms))
        else:
            flat.append(t)
    const_acc = Fraction(0)
    buckets = {}
    order = []
    for t in flat:
        if isinstance(t, Const):
            const_acc = const_acc + t.value
            continue
        c, rest = _split_coeff(t)
        k = rest.key
        if k in buckets:
            buckets[k][0] = buckets[k][0] + c
        else:
            buckets[k] = [c, rest]
            order.append(k)
    out = []
    for k in order:
        c, rest = buckets[k]
        if c == 0:
            continue
        if c == 1:
            out.append(rest)
        else:
            out.append(mul(Const(c), rest))
    if const_acc != 0 or not out:
        if const_acc != 0:
            out.append(Const(const_acc))
    if not out:
        return ZERO
    out.sort(key=lambda e: e.key)
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def mul(*factors) -> SmoothExpr:
    flat = []
    stack = [_coerce(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
        else:
            flat.append(f)
    const_acc = Fraction(1)
    powers = {}
    order = []
    for f in flat:
        if isinstance(f, Const):
            const_acc = const_acc * f.value
            if const_acc == 0:
                return ZERO
            continue
        if isinstance(f, Pow):
            base, n = f.base, f.exponent
        else:
            base, n = f, 1
        k = base.key
        if k in powers:
            powers[k][0] += n
        else:
            powers[k] = [n, base]
            order.append(k)
    out = []
    for k in order:
        n, base = powers[k]
        if n == 0:
            continue
        if n == 1:
            out.append(base)
        else:
            out.append(Pow(base, n))
    if not out:
        return Const(const_acc)
    out.sort(key=lambda e: e.key)
    if const_acc != 1 and len(out) == 1 and isinstance(out[0], Add):
        # keep sums on the outside so like terms can cancel
        return add(*(mul(Const(const_acc), t) for t in out[0].terms))
    if const_acc != 1:
        out.insert(0, Const(const_acc))
    if len(out) == 1:
        return out[0]
    return Mul(tuple(out))


def pow_(base, n: int) -> SmoothExpr:
    base = _coerce(base)
    if not isinstance(n, int):
        raise ExprError(f"exponent must be an integer, got {n!r}")
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        v = base.value
        if v == 0 and n < 0:
            raise ExprError("reciprocal of the zero constant")
        if isinstance(v, Fraction):
            return Const(v ** n)
        return Const(v ** n)
    if isinstance(base, Pow):
        return pow_(base.base, base.exponent * n)
    if isinstance(base, Mul):
        return mul(*(pow_(f, n) for f in base.factors))
    return Pow(base, n)


def _negated_form(e: SmoothExpr):
    """Return f with e == -f when e has a negative leading constant."""
    if isinstance(e, Const) and e.value < 0:
        return Const(-e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Const) \
            and e.factors[0].value < 0:
        return mul(Const(-e.factors[0].value), *e.factors[1:])
    return None


def comp(fn: str, arg) -> SmoothExpr:
    arg = _coerce(arg)
    if fn not in _FN_INDEX:
        raise ExprError(f"unknown unary {fn!r}")
    if isinstance(arg, Const):
        if arg.value == 0:
            return {"exp": ONE, "sin": ZERO, "cos": ONE}[fn]
        v = float(arg.value)
        return Const(getattr(math, fn)(v))
    neg = _negated_form(arg)
    if neg is not None:
        if fn == "sin":
            return mul(_MINUS_ONE, comp("sin", neg))
        if fn == "cos":
            return comp("cos", neg)
    return Comp1(fn, arg)


def exp(arg) -> SmoothExpr:
    return comp("exp", arg)


def sin(arg) -> SmoothExpr:
    return comp("sin", arg)


def cos(arg) -> SmoothExpr:
    return comp("cos", arg)


def glue(num: Iterable[Number], pole: int, arg) -> SmoothExpr:
    arg = _coerce(arg)
    num = [Fraction(c) for c in num]
    while num and num[-1] == 0:
        num.pop()
    if not num:
        return ZERO
    if not isinstance(pole, int) or pole < 0:
        raise ExprError(f"bad pole order {pole!r}")
    while pole > 0 and num[0] == 0:
        num.pop(0)
        pole -= 1
    if isinstance(arg, Const) and arg.value <= 0:
        return ZERO
    content = num[0]
    prim = tuple(c / content for c in num)
    node = Glue(prim, pole, arg)
    if content == 1:
        return node
    return mul(Const(content), node)


ZERO = Const(0)
ONE = Const(1)
_MINUS_ONE = Const(-1)


# ---------------------------------------------------------------------------
# evaluation

def evaluate(e: SmoothExpr, x: Sequence[float]) -> float:
    """Evaluate at a point (any sequence of reals).  Deterministic;
    raises :class:`DimensionError` when the point is too short."""
    xt = tuple(float(c) for c in x)
    if e.max_axis >= len(xt):
        raise DimensionError(
            f"expression uses axis {e.max_axis}, point has dimension {len(xt)}")
    return e._ev(xt)[0]


def eval_with_certificate(e: SmoothExpr, x: Sequence[float]):
    """Return (value, hard) where hard means the value is provably an
    exact zero at this point (not merely small)."""
    xt = tuple(float(c) for c in x)
    if e.max_axis >= len(xt):
        raise DimensionError(
            f"expression uses axis {e.max_axis}, point has dimension {len(xt)}")
    return e._ev(xt)


def is_hard_zero_at(e: SmoothExpr, x: Sequence[float]) -> bool:
    return eval_with_certificate(e, x)[1]


def all_derivatives_hard_zero(e: SmoothExpr, x: Sequence[float]) -> bool:
    """Sound one-pass certificate that e and *every* partial derivative
    of e evaluate to exact zeros at x.

    The workhorse case is a product with a glue factor whose argument
    is <= 0 at x: by the Leibniz rule every term of every derivative
    keeps some derivative of that factor, and derivatives of a glue
    node are glue nodes at the same argument, hence hard zeros left of
    the seam.  Conservative elsewhere (returns False).
    """
    xt = tuple(float(c) for c in x)

    def go(t) -> bool:
        if isinstance(t, Const):
            return t.value == 0
        if isinstance(t, Glue):
            return t.arg._ev(xt)[0] <= 0.0
        if isinstance(t, Add):
            return all(go(c) for c in t.terms)
        if isinstance(t, Mul):
            return any(go(c) for c in t.factors)
        if isinstance(t, Pow):
            return t.exponent >= 1 and go(t.base)
        return False

    if e.max_axis >= len(xt):
        raise DimensionError(
            f"expression uses axis {e.max_axis}, point has dimension {len(xt)}")
    return go(e)


# ---------------------------------------------------------------------------
# differentiation

_D1_CACHE: dict = {}


def derive1(e: SmoothExpr, axis: int) -> SmoothExpr:
    """Exact single-axis partial derivative (canonical form)."""
    k = (e, axis)
    r = _D1_CACHE.get(k)
    if r is None:
        r = e._d(axis)
        _D1_CACHE[k] = r
    return r


def derive(e: SmoothExpr, p: Sequence[int]) -> SmoothExpr:
    """Exact partial derivative for a multi-index p (one order per axis).

    ``derive(e, (0, ..., 0))`` returns e itself.
    """
    out = e
    for axis, n in enumerate(p):
        if n < 0:
            raise ExprError("multi-index entries must be nonnegative")
        for _ in range(n):
            out = derive1(out, axis)
    return out


# ---------------------------------------------------------------------------
# substitution and expansion

def subst(e: SmoothExpr, repl: Sequence[SmoothExpr]) -> SmoothExpr:
    """Replace Coord(i) by repl[i] everywhere (composition)."""
    memo = {}

    def go(t):
        r = memo.get(t)
        if r is not None:
            return r
        if isinstance(t, Const):
            r = t
        elif isinstance(t, Coord):
            if t.axis >= len(repl):
                raise DimensionError(
                    f"substitution list too short for axis {t.axis}")
            r = _coerce(repl[t.axis])
        elif isinstance(t, Add):
            r = add(*(go(c) for c in t.terms))
        elif isinstance(t, Mul):
            r = mul(*(go(c) for c in t.factors))
        elif isinstance(t, Pow):
            r = pow_(go(t.base), t.exponent)
        elif isinstance(t, Comp1):
            r = comp(t.fn, go(t.arg))
        else:
            r = glue(t.num, t.pole, go(t.arg))
        memo[t] = r
        return r

    return go(e)


def size(e: SmoothExpr) -> int:
    return 1 + sum(size(c) for c in e.children())


def expand(e: SmoothExpr, budget: int = 6000) -> SmoothExpr:
    """Distribute products over sums (and small positive powers of sums)
    so that polynomially-equal expressions collapse structurally.  Gives
    up and returns the partially expanded form when the term count would
    exceed the budget; soundness never depends on expansion."""
    if isinstance(e, Add):
        return add(*(expand(t, budget) for t in e.terms))
    if isinstance(e, Mul):
        factors = [expand(f, budget) for f in e.factors]
        sums = [(f.terms if isinstance(f, Add) else (f,)) for f in factors]
        total = 1
        for s in sums:
            total *= len(s)
            if total > budget:
                return mul(*factors)
        acc = [ONE]
        for s in sums:
            acc = [mul(a, t) for a in acc for t in s]
        return add(*acc)
    if isinstance(e, Pow):
        b = expand(e.base, budget)
        n = e.exponent
        if isinstance(b, Add) and 1 < n <= 6 and len(b.terms) ** n <= budget:
            acc = [ONE]
            for _ in range(n):
                acc = [mul(a, t) for a in acc for t in b.terms]
            return add(*acc)
        return pow_(b, n)
    if isinstance(e, Comp1):
        return comp(e.fn, expand(e.arg, budget))
    if isinstance(e, Glue):
        return glue(e.num, e.pole, expand(e.arg, budget))
    return e


def is_structural_zero(e: SmoothExpr) -> bool:
    """Sound, not complete: recognises expressions whose canonical
    (expanded) form is the zero constant."""
    return e == ZERO or expand(e) == ZERO


def _fraction_parts(t: SmoothExpr):
    num = []
    den = {}
    order = []
    factors = t.factors if isinstance(t, Mul) else (t,)
    for f in factors:
        if isinstance(f, Pow) and f.exponent < 0:
            b = f.base
            if b not in den:
                den[b] = 0
                order.append(b)
            den[b] += -f.exponent
        else:
            num.append(f)
    return num, den, order


def combine_fractions(e: SmoothExpr, budget: int = 6000) -> SmoothExpr:
    """Rewrite a top-level sum of quotients over the least common
    denominator and expand the resulting numerator, so sums like
    a/(a+b) + b/(a+b) - 1 cancel structurally.  Sound wherever the
    original expression is defined, since reciprocal powers only occur
    with nonzero bases there.  Not recursive; returns the input when no
    reciprocal factors are present."""
    if not isinstance(e, Add):
        return e
    parts = [_fraction_parts(t) for t in e.terms]
    common = {}
    order = []
    for _, den, dorder in parts:
        for b in dorder:
            if b not in common:
                common[b] = 0
                order.append(b)
            common[b] = max(common[b], den[b])
    if not common:
        return e
    scaled = []
    for num, den, _ in parts:
        extra = [pow_(b, common[b] - den.get(b, 0)) for b in order
                 if common[b] - den.get(b, 0) > 0]
        scaled.append(mul(*num, *extra))
    numerator = add(*scaled)
    if size(numerator) <= budget:
        numerator = expand(numerator, budget)
    if numerator == ZERO:
        return ZERO
    return mul(numerator, *(pow_(b, -common[b]) for b in order))


# ---------------------------------------------------------------------------
# s-expression serialisation
#
# grammar:  (const <num>) | (coord <axis>) | (+ e...) | (neg e) | (* e...)
#           | (pow e <int>) | (exp e) | (sin e) | (cos e)
#           | (glue (<num>...) (<num>...) e)
# numbers are integers, exact rationals p/q, or floats.

def _fmt_num(v) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return repr(v)


def to_sexpr(e: SmoothExpr) -> str:
    if isinstance(e, Const):
        return f"(const {_fmt_num(e.value)})"
    if isinstance(e, Coord):
        return f"(coord {e.axis})"
    if isinstance(e, Add):
        return "(+ " + " ".join(to_sexpr(t) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(* " + " ".join(to_sexpr(f) for f in e.factors) + ")"
    if isinstance(e, Pow):
        return f"(pow {to_sexpr(e.base)} {e.exponent})"
    if isinstance(e, Comp1):
        return f"({e.fn} {to_sexpr(e.arg)})"
    if isinstance(e, Glue):
        num = " ".join(_fmt_num(c) for c in e.num)
        den = " ".join(["0"] * e.pole + ["1"])
        return f"(glue ({num}) ({den}) {to_sexpr(e.arg)})"
    raise ExprError(f"unknown node {e!r}")


class SExprError(ExprError):
    """Unparseable s-expression text."""


def _tokenize(text: str):
    out = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append(c)
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _parse_num(tok: str):
    try:
        if "/" in tok:
            return Fraction(tok)
        if any(c in tok for c in ".eE") and not tok.lstrip("+-").isdigit():
            return float(tok)
        return Fraction(int(tok))
    except ValueError:
        raise SExprError(f"bad number {tok!r}")


def _read(tokens, pos):
    if pos >= len(tokens):
        raise SExprError("unexpected end of input")
    tok = tokens[pos]
    if tok != "(":
        raise SExprError(f"expected '(', got {tok!r}")
    pos += 1
    if pos >= len(tokens):
        raise SExprError("unexpected end of input")
    head = tokens[pos]
    pos += 1
    items = []
    while True:
        if pos >= len(tokens):
            raise SExprError("missing ')'")
        if tokens[pos] == ")":
            return (head, items), pos + 1
        if tokens[pos] == "(":
            node, pos = _read_any(tokens, pos)
            items.append(node)
        else:
            items.append(tokens[pos])
            pos += 1


def _read_any(tokens, pos):
    # a parenthesised form is either an operator form or a bare number list
    if tokens[pos] != "(":
        raise SExprError(f"expected '(', got {tokens[pos]!r}")
    head = tokens[pos + 1] if pos + 1 < len(tokens) else None
    if head in ("const", "coord", "+", "neg", "*", "pow", "exp", "sin",
                "cos", "glue"):
        return _read(tokens, pos)
    # number list
    pos += 1
    nums = []
    while pos < len(tokens) and tokens[pos] != ")":
        if tokens[pos] == "(":
            raise SExprError("nested list where a number was expected")
        nums.append(_parse_num(tokens[pos]))
        pos += 1
    if pos >= len(tokens):
        raise SExprError("missing ')'")
    return ("#list", nums), pos + 1


def _build(node) -> SmoothExpr:
    head, items = node
    if head == "const":
        if len(items) != 1 or not isinstance(items[0], str):
            raise SExprError("(const <number>)")
        return const(_parse_num(items[0]))
    if head == "coord":
        if len(items) != 1 or not isinstance(items[0], str):
            raise SExprError("(coord <axis>)")
        try:
            return coord(int(items[0]))
        except ValueError:
            raise SExprError(f"bad axis {items[0]!r}")
    if head == "+":
        return add(*(_build(i) for i in _expect_nodes(items)))
    if head == "neg":
        sub = _expect_nodes(items)
        if len(sub) != 1:
            raise SExprError("(neg e)")
        return mul(_MINUS_ONE, _build(sub[0]))
    if head == "*":
        return mul(*(_build(i) for i in _expect_nodes(items)))
    if head == "pow":
        if len(items) != 2 or not isinstance(items[1], str):
            raise SExprError("(pow e <int>)")
        try:
            n = int(items[1])
        except ValueError:
            raise SExprError(f"bad exponent {items[1]!r}")
        return pow_(_build(items[0]), n)
    if head in ("exp", "sin", "cos"):
        sub = _expect_nodes(items)
        if len(sub) != 1:
            raise SExprError(f"({head} e)")
        return comp(head, _build(sub[0]))
    if head == "glue":
        if len(items) != 3:
            raise SExprError("(glue (num...) (den...) e)")
        numn, denn, argn = items
        if not (isinstance(numn, tuple) and numn[0] == "#list"
                and isinstance(denn, tuple) and denn[0] == "#list"):
            raise SExprError("glue coefficient lists must be (n0 n1 ...)")
        num, den = numn[1], denn[1]
        # the denominator may only have its root at t = 0: c * t^k
        while den and den[-1] == 0:
            den.pop()
        if not den:
            raise SExprError("glue denominator is zero")
        lead = den[-1]
        if any(c != 0 for c in den[:-1]):
            raise SExprError("glue denominator must be a monomial c*t^k")
        pole = len(den) - 1
        return glue([c / lead for c in num], pole, _build(argn))
    raise SExprError(f"unknown form {head!r}")


def _expect_nodes(items):
    for i in items:
        if isinstance(i, str):
            raise SExprError(f"expected a subexpression, got atom {i!r}")
    return items


def from_sexpr(text: str) -> SmoothExpr:
    tokens = _tokenize(text)
    if not tokens:
        raise SExprError("empty input")
    node, pos = _read_any(tokens, 0)
    if pos != len(tokens):
        raise SExprError("trailing tokens after expression")
    if node[0] == "#list":
        raise SExprError("a bare number list is not an expression")
    return _build(node)
