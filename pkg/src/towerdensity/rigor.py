"""Directed-rounding decimal arithmetic and certified enclosures of zeta(s).

Every :class:`DirectedDecimal` carries the side from which it bounds the
quantity it stands for. Arithmetic is delegated to :mod:`decimal` contexts
with ``ROUND_FLOOR`` (down) or ``ROUND_CEILING`` (up); each operation is
correctly rounded, so it adds at most one ulp of one-sided error.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal, Inexact
from fractions import Fraction
from functools import lru_cache

from .errors import DirectionError

DEFAULT_PRECISION = 128
MIN_PRECISION = 8
DEFAULT_ZETA_TERMS = 10**5
DEFAULT_EM_TERMS = 100


class Direction(str, enum.Enum):
    DOWN = "down"
    UP = "up"
    EXACT = "exact"

    def flip(self) -> Direction:
        if self is Direction.DOWN:
            return Direction.UP
        if self is Direction.UP:
            return Direction.DOWN
        return self

    @property
    def rounding(self) -> str:
        if self is Direction.EXACT:
            raise DirectionError("an exact result has no rounding side")
        return ROUND_FLOOR if self is Direction.DOWN else ROUND_CEILING


DOWN = Direction.DOWN
UP = Direction.UP
EXACT = Direction.EXACT


def _context(precision: int, direction: Direction) -> Context:
    return Context(prec=precision, rounding=direction.rounding, Emin=-10**9, Emax=10**9)


@dataclass(frozen=True)
class DirectedDecimal:
    """A decimal value certified to bound its target from one side.

    ``direction`` is ``DOWN`` for lower bounds, ``UP`` for upper bounds and
    ``EXACT`` when no rounding has happened yet.
    """

    value: Decimal
    precision: int
    direction: Direction

    @property
    def mantissa(self) -> int:
        sign, digits, _ = self.value.as_tuple()
        m = int("".join(map(str, digits)) or "0")
        return -m if sign else m

    @property
    def decimal_exponent(self) -> int:
        return int(self.value.as_tuple().exponent)

    def as_fraction(self) -> Fraction:
        return Fraction(self.value)

    def to_string(self, digits: int) -> str:
        """Render with ``digits`` significant digits, rounding toward the certified side.

        Down values are truncated toward minus infinity and up values rounded
        toward plus infinity, so the printed number is still a valid bound.
        """
        if self.value.is_zero():
            return "0." + "0" * max(digits - 1, 0)
        rounding = ROUND_HALF_EVEN if self.direction is EXACT else self.direction.rounding
        ctx = Context(prec=digits, rounding=rounding, Emin=-10**9, Emax=10**9)
        v = ctx.plus(self.value)
        if v.adjusted() < 0:
            # keep the leading "0." form used by the appendix tables
            places = digits - v.adjusted() - 1
            return f"{v:.{places}f}"
        places = max(digits - v.adjusted() - 1, 0)
        return f"{v:.{places}f}"

    def __str__(self) -> str:
        return self.to_string(min(self.precision, 40))

    def __float__(self) -> float:
        return float(self.value)


def _check_precision(precision: int) -> None:
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION}, got {precision}")


def dd_exact(value: int | str | Decimal, precision: int = DEFAULT_PRECISION) -> DirectedDecimal:
    """Wrap a value that is known exactly (no rounding applied)."""
    _check_precision(precision)
    d = Decimal(value)
    return DirectedDecimal(d, precision, EXACT)


def dd_from_rational(
    num: int, den: int, precision: int = DEFAULT_PRECISION, direction: Direction = DOWN
) -> DirectedDecimal:
    """Round ``num/den`` to ``precision`` significant digits toward ``direction``.

    >>> dd_from_rational(1, 3, 10, DOWN).value
    Decimal('0.3333333333')
    >>> dd_from_rational(1, 3, 10, UP).value
    Decimal('0.3333333334')
    """
    _check_precision(precision)
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    direction = Direction(direction)
    if den < 0:
        num, den = -num, -den
    if direction is EXACT:
        raise DirectionError("dd_from_rational needs a rounding side")
    ctx = _context(precision, direction)
    q = ctx.divide(Decimal(num), Decimal(den))
    if not ctx.flags[Inexact]:
        return DirectedDecimal(q, precision, EXACT)
    return DirectedDecimal(q, precision, direction)


def dd_from_fraction(x: Fraction, precision: int = DEFAULT_PRECISION, direction: Direction = DOWN):
    return dd_from_rational(x.numerator, x.denominator, precision, direction)


def _resolve(result: Direction | None, needs: list[Direction], op: str) -> Direction:
    """Pick the result side given each operand's required matching side."""
    sides = {d for d in needs if d is not EXACT}
    if result is None:
        if len(sides) > 1:
            raise DirectionError(f"{op}: operands certify opposite sides")
        return sides.pop() if sides else EXACT
    result = Direction(result)
    if result is EXACT:
        if sides:
            raise DirectionError(f"{op}: rounded operands cannot give an exact result")
        return EXACT
    if sides - {result}:
        raise DirectionError(f"{op}: operand directions incompatible with a {result.value} result")
    return result


def _finish(op, a: DirectedDecimal, b: DirectedDecimal, precision: int,
            direction: Direction) -> DirectedDecimal:
    both_exact = a.direction is EXACT and b.direction is EXACT
    if direction is EXACT:
        # try both sides; identical results mean no rounding happened
        lo = op(_context(precision, DOWN), a.value, b.value)
        hi = op(_context(precision, UP), a.value, b.value)
        if lo != hi:
            raise DirectionError("exact operands give an inexact result; pass a direction")
        return DirectedDecimal(lo, precision, EXACT)
    ctx = _context(precision, direction)
    v = op(ctx, a.value, b.value)
    if both_exact and not ctx.flags[Inexact]:
        return DirectedDecimal(v, precision, EXACT)
    return DirectedDecimal(v, precision, direction)


def _nonneg(*xs: DirectedDecimal) -> None:
    for x in xs:
        if x.value < 0:
            raise ValueError("directed multiplication/division needs nonnegative operands")


def _prec(a: DirectedDecimal, b: DirectedDecimal, precision: int | None) -> int:
    return precision if precision is not None else max(a.precision, b.precision)


def dd_add(a: DirectedDecimal, b: DirectedDecimal, direction: Direction | None = None,
           precision: int | None = None) -> DirectedDecimal:
    d = _resolve(direction, [a.direction, b.direction], "add")
    return _finish(lambda c, x, y: c.add(x, y), a, b, _prec(a, b, precision), d)


def dd_sub(a: DirectedDecimal, b: DirectedDecimal, direction: Direction | None = None,
           precision: int | None = None) -> DirectedDecimal:
    """``a - b``; the subtrahend must certify the opposite side of the result."""
    d = _resolve(direction, [a.direction, b.direction.flip()], "sub")
    return _finish(lambda c, x, y: c.subtract(x, y), a, b, _prec(a, b, precision), d)


def dd_mul(a: DirectedDecimal, b: DirectedDecimal, direction: Direction | None = None,
           precision: int | None = None) -> DirectedDecimal:
    _nonneg(a, b)
    d = _resolve(direction, [a.direction, b.direction], "mul")
    return _finish(lambda c, x, y: c.multiply(x, y), a, b, _prec(a, b, precision), d)


def dd_div(a: DirectedDecimal, b: DirectedDecimal, direction: Direction | None = None,
           precision: int | None = None) -> DirectedDecimal:
    """``a / b``; the divisor must certify the opposite side of the result."""
    _nonneg(a, b)
    d = _resolve(direction, [a.direction, b.direction.flip()], "div")
    if b.value.is_zero():
        raise DirectionError("divisor may be zero on its certified side")
    return _finish(lambda c, x, y: c.divide(x, y), a, b, _prec(a, b, precision), d)


def dd_pow_int(a: DirectedDecimal, k: int, direction: Direction | None = None,
               precision: int | None = None) -> DirectedDecimal:
    """``a**k`` by repeated squaring, every step rounded toward the result side."""
    if k < 0:
        raise ValueError("negative powers are not supported; use dd_div")
    _nonneg(a)
    prec = precision if precision is not None else a.precision
    d = _resolve(direction, [a.direction], "pow")
    if d is EXACT:
        return _finish(lambda c, x, y: c.power(x, y), a, dd_exact(k, prec), prec, EXACT)
    ctx = _context(prec, d)
    result = Decimal(1)
    base = a.value
    while k:
        if k & 1:
            result = ctx.multiply(result, base)
        k >>= 1
        if k:
            base = ctx.multiply(base, base)
    return DirectedDecimal(result, prec, d)


def dd_product(factors, direction: Direction, precision: int) -> DirectedDecimal:
    """Directed product of nonnegative factors, multiplied in the given order."""
    ctx = _context(precision, direction)
    acc = Decimal(1)
    for f in factors:
        acc = ctx.multiply(acc, f.value if isinstance(f, DirectedDecimal) else f)
    return DirectedDecimal(acc, precision, direction)


def dd_round(x: DirectedDecimal, precision: int, direction: Direction | None = None) -> DirectedDecimal:
    """Re-round ``x`` to ``precision`` digits without leaving its certified side."""
    d = _resolve(direction, [x.direction], "round")
    if d is EXACT:
        return _finish(lambda c, a, b: c.plus(a), x, x, precision, EXACT)
    ctx = _context(precision, d)
    v = ctx.plus(x.value)
    if x.direction is EXACT and not ctx.flags[Inexact]:
        return DirectedDecimal(v, precision, EXACT)
    return DirectedDecimal(v, precision, d)


def dd_max(*xs: DirectedDecimal) -> DirectedDecimal:
    return max(xs, key=lambda x: x.value)


def dd_min(*xs: DirectedDecimal) -> DirectedDecimal:
    return min(xs, key=lambda x: x.value)


# ---------------------------------------------------------------------------
# zeta(s) for integer s >= 2


@dataclass(frozen=True)
class ZetaEnclosure:
    s: int
    terms: int
    low: DirectedDecimal
    high: DirectedDecimal
    method: str = "integral"

    def contains(self, x) -> bool:
        x = Fraction(x) if not isinstance(x, Decimal) else Fraction(x)
        return self.low.as_fraction() <= x <= self.high.as_fraction()

    @property
    def width(self) -> Fraction:
        return self.high.as_fraction() - self.low.as_fraction()


def zeta_elementary_bounds(s: int) -> tuple[Fraction, Fraction]:
    """Exact rational bounds ``1 + 2^-s <= zeta(s) <= 1 + (s+1)/(2^s (s-1))``."""
    if s < 2:
        raise ValueError("s must be >= 2")
    return Fraction(2**s + 1, 2**s), 1 + Fraction(s + 1, 2**s * (s - 1))


def _integral_tail(s: int, start: int) -> Fraction:
    # integral of x^-s over [start, inf)
    return Fraction(1, (s - 1) * start ** (s - 1))


@lru_cache(maxsize=64)
def zeta_enclosure(s: int, terms: int = DEFAULT_ZETA_TERMS,
                   precision: int = DEFAULT_PRECISION) -> ZetaEnclosure:
    """Partial sum of ``terms`` terms plus integral bounds on the tail.

    The enclosure is intersected with the elementary bounds, so it never
    exceeds them.
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if terms < 2:
        raise ValueError("terms must be >= 2")
    _check_precision(precision)
    lo_ctx = _context(precision, DOWN)
    hi_ctx = _context(precision, UP)
    one = Decimal(1)
    lo = hi = Decimal(0)
    for n in range(terms, 0, -1):
        # smallest terms first keeps the accumulated rounding small
        d = Decimal(n**s)
        lo = lo_ctx.add(lo, lo_ctx.divide(one, d))
        hi = hi_ctx.add(hi, hi_ctx.divide(one, d))
    t_lo = _integral_tail(s, terms + 1)
    t_hi = _integral_tail(s, terms)
    lo = lo_ctx.add(lo, lo_ctx.divide(Decimal(t_lo.numerator), Decimal(t_lo.denominator)))
    hi = hi_ctx.add(hi, hi_ctx.divide(Decimal(t_hi.numerator), Decimal(t_hi.denominator)))
    e_lo, e_hi = zeta_elementary_bounds(s)
    e_lo_d = dd_from_fraction(e_lo, precision, DOWN).value
    e_hi_d = dd_from_fraction(e_hi, precision, UP).value
    return ZetaEnclosure(
        s, terms,
        DirectedDecimal(max(lo, e_lo_d), precision, DOWN),
        DirectedDecimal(min(hi, e_hi_d), precision, UP),
        "integral",
    )


_bernoulli_cache: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with the convention B_1 = -1/2.

    Values are kept in one table that grows on demand, so asking for
    B_2, B_4, ..., B_2K in turn costs a single O(K^2) pass.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    with _bernoulli_lock:
        B = _bernoulli_cache
        for m in range(len(B), n + 1):
            acc = Fraction(0)
            c = 1  # binomial(m+1, k)
            for k in range(m):
                if B[k]:
                    acc += c * B[k]
                c = c * (m + 1 - k) // (k + 1)
            B.append(-acc / (m + 1))
        return B[n]


# pi > 314159/100000; only used to bound the remainder, so crude is fine
_TWO_PI_LOW = Fraction(2 * 314159, 100000)


def _em_pieces(s: int, terms: int, precision: int) -> tuple[Fraction, Fraction, int]:
    """Euler-Maclaurin estimate of zeta(s) and a bound on its remainder.

    The head sum runs over ``n < terms``; the tail starting at ``n = terms``
    is replaced by its integral, half the first term and Bernoulli
    corrections up to order ``2K``. The remainder is bounded by
    ``2 zeta(2K) / (2 pi)^(2K) * |f^(2K-1)(terms)|`` with ``zeta(2K) <= 2``.
    """
    M = terms
    head = sum((Fraction(1, n**s) for n in range(1, M)), Fraction(0))
    tail = _integral_tail(s, M) + Fraction(1, 2 * M**s)
    target = Fraction(1, 10 ** (precision + 6))
    # rising factorial s (s+1) ... (s+2k-2) accumulates across k
    rising = Fraction(s)
    best_rem = None
    k = 1
    k_max = 3 * M  # terms grow again past roughly pi*M
    while k <= k_max:
        b = bernoulli(2 * k)
        fact = math.factorial(2 * k)
        deriv = rising / Fraction(M ** (s + 2 * k - 1))  # |f^(2k-1)(M)|
        tail += b / fact * deriv
        rem = 4 * deriv / _TWO_PI_LOW ** (2 * k)
        if best_rem is not None and rem > best_rem:
            tail -= b / fact * deriv
            break
        best_rem = rem
        if rem < target:
            break
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        k += 1
    return head + tail, best_rem, k


@lru_cache(maxsize=256)
def zeta_enclosure_em(s: int, terms: int = DEFAULT_EM_TERMS,
                      precision: int = DEFAULT_PRECISION) -> ZetaEnclosure:
    """Tight zeta(s) enclosure from an Euler-Maclaurin tail with rigorous remainder.

    Exact rational arithmetic until the final two roundings, so the width is
    about ``2 * remainder + 2 ulp``.
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if terms < 2:
        raise ValueError("terms must be >= 2")
    _check_precision(precision)
    est, rem, _ = _em_pieces(s, terms, precision)
    lo = dd_from_fraction(est - rem, precision, DOWN)
    hi = dd_from_fraction(est + rem, precision, UP)
    e_lo, e_hi = zeta_elementary_bounds(s)
    lo_v = max(lo.value, dd_from_fraction(e_lo, precision, DOWN).value)
    hi_v = min(hi.value, dd_from_fraction(e_hi, precision, UP).value)
    return ZetaEnclosure(s, terms, DirectedDecimal(lo_v, precision, DOWN),
                         DirectedDecimal(hi_v, precision, UP), "euler-maclaurin")


ZETA_METHODS = {"integral": zeta_enclosure, "euler-maclaurin": zeta_enclosure_em}
