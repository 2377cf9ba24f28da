"""Certified bounds on the density d(q) of M(q).

Four truncated Euler-product inequalities are implemented, each taking a
finite prime set P (q excluded) and finite pieces of M(q) or its complement:

* ``lower_S``    1 - (1-1/q) prod_P [1 - (1-1/p) sum_S p^-s]
* ``lower_B``    1 - (1-1/q) prod_P [(1-1/p) sum_B p^-b]
* ``upper_A``    1 - c_q / zeta(q) prod_P [(1-1/p)/(1-p^-q) sum_A p^-a]
* ``lower_zeta`` 1 - c_{q+1} / zeta(q+1) prod_P [(1 - (1-1/p) sum_S p^-s) / (1-p^-(q+1))]

with ``c_k = (q^k - q^(k-1)) / (q^k - 1)``. ``lower_zeta`` needs q in S.

Each per-prime factor is formed as an exact rational and rounded once; the
product and the final combination are rounded so that the result stays on
its certified side. Work happens with a few guard digits and the result is
rounded once more to the requested precision.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from decimal import Decimal
from fractions import Fraction
from typing import Callable

from .errors import InvariantError
from .primes import first_k_primes
from .rigor import (
    DEFAULT_EM_TERMS,
    DEFAULT_PRECISION,
    DEFAULT_ZETA_TERMS,
    DOWN,
    UP,
    DirectedDecimal,
    Direction,
    ZETA_METHODS,
    ZetaEnclosure,
    dd_div,
    dd_exact,
    dd_from_rational,
    dd_mul,
    dd_product,
    dd_round,
    dd_sub,
)
from .tower import is_member, require_prime

CHUNK_SIZE = 512
LOWER_NAMES = ("lower_S", "lower_B", "lower_zeta")
UPPER_NAMES = ("upper_A",)


@dataclass(frozen=True)
class BoundParams:
    """Truncation parameters for the bound formulas.

    ``num_primes`` counts primes from 2 upward; q is dropped from that list,
    so P has ``num_primes - 1`` elements when q is among them. The sets are
    S = M(q) in 1..s_cutoff, A = complement in 0..a_cutoff, and B = the
    complement in 0..b_cutoff plus every integer above b_cutoff.
    """

    q: int
    num_primes: int = 0
    s_cutoff: int = 20
    a_cutoff: int = 20
    b_cutoff: int | None = None
    precision: int = DEFAULT_PRECISION
    zeta_terms: int | None = None
    zeta_method: str = "euler-maclaurin"
    threads: int = 1

    def __post_init__(self):
        require_prime(self.q)
        if self.num_primes < 0:
            raise ValueError("num_primes must be >= 0")
        for name in ("s_cutoff", "a_cutoff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.b_cutoff is not None and self.b_cutoff < 0:
            raise ValueError("b_cutoff must be >= 0")
        if self.precision < 8:
            raise ValueError("precision must be >= 8")
        if self.zeta_method not in ZETA_METHODS:
            raise ValueError(f"zeta_method must be one of {sorted(ZETA_METHODS)}")
        if self.zeta_terms is not None and self.zeta_terms < 2:
            raise ValueError("zeta_terms must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def effective_b_cutoff(self) -> int:
        return self.a_cutoff if self.b_cutoff is None else self.b_cutoff

    @property
    def effective_zeta_terms(self) -> int:
        if self.zeta_terms is not None:
            return self.zeta_terms
        return DEFAULT_EM_TERMS if self.zeta_method == "euler-maclaurin" else DEFAULT_ZETA_TERMS

    def primes(self) -> list[int]:
        return [p for p in first_k_primes(self.num_primes) if p != self.q]

    def s_set(self) -> list[int]:
        return [m for m in range(1, self.s_cutoff + 1) if is_member(m, self.q)]

    def a_set(self) -> list[int]:
        return [m for m in range(0, self.a_cutoff + 1) if not is_member(m, self.q)]

    def b_set(self) -> list[int]:
        return [m for m in range(0, self.effective_b_cutoff + 1) if not is_member(m, self.q)]

    @property
    def working_precision(self) -> int:
        """Output precision plus guard digits covering every intermediate rounding."""
        return self.precision + len(str(2 * self.num_primes + 8)) + 4

    def zeta(self, s: int) -> ZetaEnclosure:
        return ZETA_METHODS[self.zeta_method](s, self.effective_zeta_terms,
                                              self.working_precision)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["b_cutoff"] = self.effective_b_cutoff
        d["zeta_terms"] = self.effective_zeta_terms
        d.pop("threads")
        return d


@dataclass(frozen=True)
class DensityInterval:
    q: int
    lower: DirectedDecimal
    upper: DirectedDecimal
    params: BoundParams
    digits_agreed: int
    winner_lower: str
    winner_upper: str
    candidates: dict = field(default_factory=dict, compare=False)

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lower.as_fraction() <= x <= self.upper.as_fraction()


# ---------------------------------------------------------------------------
# exact per-prime pieces


def _power_sum_numerator(p: int, exponents: list[int], top: int) -> int:
    """Integer N with sum_{m in exponents} p^-m = N / p^top (all m <= top)."""
    members = set(exponents)
    n = 0
    for m in range(0, top + 1):
        n = n * p + (1 if m in members else 0)
    return n


def factor_sum_exact(p: int, exponents, tail_from: int | None = None) -> Fraction:
    """Exact sum of p^-m over ``exponents``, plus p^-m for all m > tail_from if given."""
    exps = sorted(set(exponents))
    if any(m < 0 for m in exps):
        raise ValueError("exponents must be >= 0")
    if tail_from is not None and exps and exps[-1] > tail_from:
        raise ValueError("finite exponents must not exceed tail_from")
    top = max(exps + ([tail_from] if tail_from is not None else []), default=0)
    total = Fraction(_power_sum_numerator(p, exps, top), p**top)
    if tail_from is not None:
        total += Fraction(1, p**tail_from * (p - 1))
    return total


def factor_sum(p: int, exponents, tail_from: int | None = None,
               direction: Direction = DOWN, precision: int = DEFAULT_PRECISION) -> DirectedDecimal:
    """Directed value of sum_{m} p^-m over a finite set, optionally with a full geometric tail."""
    if p < 2:
        raise ValueError("p must be >= 2")
    x = factor_sum_exact(p, exponents, tail_from)
    return dd_from_rational(x.numerator, x.denominator, precision, direction)


def _s_factor(p: int, s_set: list[int], top: int) -> tuple[int, int]:
    # 1 - (1-1/p) N/p^top = (p^(top+1) - (p-1) N) / p^(top+1)
    n = _power_sum_numerator(p, s_set, top)
    den = p ** (top + 1)
    return den - (p - 1) * n, den


def _zeta_factor(p: int, s_set: list[int], top: int, q: int) -> tuple[int, int]:
    num, den = _s_factor(p, s_set, top)
    pk = p ** (q + 1)
    return num * pk, den * (pk - 1)


def _a_factor(p: int, a_set: list[int], top: int, q: int) -> tuple[int, int]:
    # (1-1/p)/(1-p^-q) N/p^top = (p-1) p^(q-1) N / ((p^q - 1) p^top)
    n = _power_sum_numerator(p, a_set, top)
    return (p - 1) * p ** (q - 1) * n, (p**q - 1) * p**top


def _b_factor(p: int, b_set: list[int], top: int) -> tuple[int, int]:
    # (1-1/p) (N/p^top + 1/(p^top (p-1))) = ((p-1) N + 1) / p^(top+1)
    n = _power_sum_numerator(p, b_set, top)
    return (p - 1) * n + 1, p ** (top + 1)


def _directed_product(primes: list[int], make: Callable[[int], tuple[int, int]],
                      direction: Direction, precision: int, threads: int) -> DirectedDecimal:
    """Product of per-prime factors over fixed-size chunks, combined in index order.

    Chunk boundaries depend only on ``len(primes)``, so the rounded result is
    identical for every thread count.
    """
    def chunk_product(chunk: list[int]) -> DirectedDecimal:
        return dd_product(
            (dd_from_rational(*make(p), precision, direction) for p in chunk),
            direction, precision,
        )

    chunks = [primes[i : i + CHUNK_SIZE] for i in range(0, len(primes), CHUNK_SIZE)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk_product, chunks))
    else:
        parts = [chunk_product(c) for c in chunks]
    return dd_product(parts, direction, precision)


def _leading_constant(q: int, k: int, direction: Direction, precision: int) -> DirectedDecimal:
    # (q^k - q^(k-1)) / (q^k - 1)
    return dd_from_rational(q**k - q ** (k - 1), q**k - 1, precision, direction)


def _one(precision: int) -> DirectedDecimal:
    return dd_exact(1, precision)


# ---------------------------------------------------------------------------
# the four inequalities


def bound_lower_S(params: BoundParams) -> DirectedDecimal:
    prec = params.working_precision
    s_set = params.s_set()
    top = max(s_set, default=0)
    prod = _directed_product(params.primes(), lambda p: _s_factor(p, s_set, top),
                             UP, prec, params.threads)
    scale = dd_from_rational(params.q - 1, params.q, prec, UP)
    return dd_round(dd_sub(_one(prec), dd_mul(scale, prod, UP), DOWN), params.precision, DOWN)


def bound_lower_B(params: BoundParams) -> DirectedDecimal:
    prec = params.working_precision
    b_set = params.b_set()
    top = params.effective_b_cutoff
    prod = _directed_product(params.primes(), lambda p: _b_factor(p, b_set, top),
                             UP, prec, params.threads)
    scale = dd_from_rational(params.q - 1, params.q, prec, UP)
    return dd_round(dd_sub(_one(prec), dd_mul(scale, prod, UP), DOWN), params.precision, DOWN)


def bound_upper_A(params: BoundParams) -> DirectedDecimal:
    prec = params.working_precision
    q = params.q
    a_set = params.a_set()
    if 0 not in a_set:
        raise ValueError("A must contain 0")
    top = max(a_set)
    prod = _directed_product(params.primes(), lambda p: _a_factor(p, a_set, top, q),
                             DOWN, prec, params.threads)
    inv_zeta = dd_div(_one(prec), params.zeta(q).high, DOWN)
    scale = dd_mul(_leading_constant(q, q, DOWN, prec), inv_zeta, DOWN)
    return dd_round(dd_sub(_one(prec), dd_mul(scale, prod, DOWN), UP), params.precision, UP)


def bound_lower_zeta(params: BoundParams) -> DirectedDecimal:
    prec = params.working_precision
    q = params.q
    s_set = params.s_set()
    if q not in s_set:
        raise ValueError(f"q={q} must lie in S (s_cutoff >= q)")
    top = max(s_set)
    prod = _directed_product(params.primes(), lambda p: _zeta_factor(p, s_set, top, q),
                             UP, prec, params.threads)
    inv_zeta = dd_div(_one(prec), params.zeta(q + 1).low, UP)
    scale = dd_mul(_leading_constant(q, q + 1, UP, prec), inv_zeta, UP)
    return dd_round(dd_sub(_one(prec), dd_mul(scale, prod, UP), DOWN), params.precision, DOWN)


BOUNDS = {
    "lower_S": bound_lower_S,
    "lower_B": bound_lower_B,
    "lower_zeta": bound_lower_zeta,
    "upper_A": bound_upper_A,
}


# ---------------------------------------------------------------------------
# intervals


def digits_agreed(lower: DirectedDecimal | Decimal | str, upper: DirectedDecimal | Decimal | str) -> int:
    """Leading significant digits shared by the decimal expansions of two values."""
    lo = lower.value if isinstance(lower, DirectedDecimal) else Decimal(lower)
    hi = upper.value if isinstance(upper, DirectedDecimal) else Decimal(upper)
    if lo <= 0 or hi <= 0 or lo.adjusted() != hi.adjusted():
        return 0
    a = "".join(map(str, lo.as_tuple().digits))
    b = "".join(map(str, hi.as_tuple().digits))
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    if n == min(len(a), len(b)) and len(a) != len(b):
        # one expansion ended; compare the rest of the other against zeros
        rest = (a if len(a) > len(b) else b)[n:]
        n += len(rest) - len(rest.lstrip("0"))
    return n


def _assemble(params: BoundParams, candidates: dict[str, DirectedDecimal]) -> DensityInterval:
    lowers = {k: v for k, v in candidates.items() if k.startswith("lower")}
    uppers = {k: v for k, v in candidates.items() if k.startswith("upper")}
    # ties go to the first name in declaration order
    wl = max(lowers, key=lambda k: (lowers[k].value, -LOWER_NAMES.index(k)))
    wu = min(uppers, key=lambda k: (uppers[k].value, UPPER_NAMES.index(k)))
    lower, upper = lowers[wl], uppers[wu]
    if not (0 <= lower.value <= upper.value <= 1):
        raise InvariantError(f"inconsistent bounds for q={params.q}: {lower.value} > {upper.value}")
    return DensityInterval(params.q, lower, upper, params, digits_agreed(lower, upper),
                           wl, wu, candidates)


def all_bounds(params: BoundParams) -> dict[str, DirectedDecimal]:
    out = {
        "lower_S": bound_lower_S(params),
        "lower_B": bound_lower_B(params),
    }
    if params.s_cutoff >= params.q:
        out["lower_zeta"] = bound_lower_zeta(params)
    out["upper_A"] = bound_upper_A(params)
    return out


def best_interval(params: BoundParams) -> DensityInterval:
    """Tightest interval from every applicable inequality; records the winners."""
    return _assemble(params, all_bounds(params))


def additive_window(q: int) -> tuple[Fraction, Fraction]:
    """Exact window containing d(q) - 1/q for every prime q."""
    lo = Fraction(1, 2 ** (q + 1)) * (1 - Fraction(1, q)) - Fraction(1, q**q)
    hi = Fraction(1, 2**q) * (1 + Fraction(1, q))
    return lo, hi


def in_additive_window(interval: DensityInterval, ulps: int = 0) -> bool:
    """Whether both endpoints sit in the additive window, widened by ``ulps``.

    The window shrinks like 2^-q, so at low precision the rounded endpoints can
    only be expected inside it up to a couple of units in the last place.
    """
    lo, hi = additive_window(interval.q)
    base = Fraction(1, interval.q)
    exp = interval.upper.value.adjusted() - interval.params.precision + 1
    slack = ulps * Fraction(10) ** exp
    return (lo - slack <= interval.lower.as_fraction() - base
            and interval.upper.as_fraction() - base <= hi + slack)


def asymptotic_interval(q: int, precision: int = DEFAULT_PRECISION,
                        zeta_method: str = "euler-maclaurin",
                        zeta_terms: int | None = None) -> DensityInterval:
    """Closed-form interval with no primes in P, checked against the additive window."""
    params = BoundParams(q=q, num_primes=0, s_cutoff=q, a_cutoff=max(q - 1, 1),
                         precision=precision, zeta_method=zeta_method, zeta_terms=zeta_terms)
    interval = _assemble(params, {
        "lower_zeta": bound_lower_zeta(params),
        "upper_A": bound_upper_A(params),
    })
    if not in_additive_window(interval, ulps=2):
        raise InvariantError(f"asymptotic interval for q={q} escapes the additive window")
    return interval


def interval_to_dict(interval: DensityInterval, digits: int) -> dict:
    return {
        "q": interval.q,
        "lower": interval.lower.to_string(digits),
        "upper": interval.upper.to_string(digits),
        "digits_agreed": interval.digits_agreed,
        "winner_lower": interval.winner_lower,
        "winner_upper": interval.winner_upper,
        "params": interval.params.to_dict(),
        "bounds": {k: v.to_string(digits) for k, v in interval.candidates.items()},
    }


def with_primes(params: BoundParams, num_primes: int) -> BoundParams:
    return replace(params, num_primes=num_primes)
