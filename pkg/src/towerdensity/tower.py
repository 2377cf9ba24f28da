"""Tower factorizations and membership in M(q).

A tower factorization rewrites every exponent of a prime factorization by its
own prime factorization, recursively, until only primes and 1 remain. An
integer belongs to M(q) when q shows up anywhere in that tree; 0 and 1 are
never members.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapacityError
from .primes import factor, is_prime, primes_up_to

MEMO_CUTOFF = 10**4
MEMBER_SET_CEILING = 10**6

Factorizer = Callable[[int], Sequence[tuple[int, int]]]


@dataclass(frozen=True)
class TowerFactorization:
    """Tree of ``(prime, exponent_tower)`` pairs; no factors means the number 1."""

    factors: tuple[tuple[int, TowerFactorization], ...] = ()

    @property
    def is_one(self) -> bool:
        return not self.factors

    def value(self) -> int:
        out = 1
        for p, sub in self.factors:
            out *= p ** sub.value()
        return out

    def primes(self) -> set[int]:
        out: set[int] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            for p, sub in node.factors:
                out.add(p)
                stack.append(sub)
        return out

    def to_json(self) -> list:
        return [{"prime": p, "exponent": sub.to_json()} for p, sub in self.factors]

    def __str__(self) -> str:
        return render_tower(self)


ONE = TowerFactorization()


def tower_from_factorization(pairs: Iterable[tuple[int, int]],
                             factorizer: Factorizer = factor) -> TowerFactorization:
    """Build a tower from an already known prime factorization.

    Exponents may be huge (their value is never formed into ``p**e``); they
    only need to be factorable by ``factorizer``.
    """
    merged: dict[int, int] = {}
    for p, e in pairs:
        if e < 1:
            raise ValueError(f"exponent must be >= 1, got {e}")
        merged[p] = merged.get(p, 0) + e
    return TowerFactorization(tuple(
        (p, tower_factorize(e, factorizer)) for p, e in sorted(merged.items())
    ))


def tower_factorize(n: int, factorizer: Factorizer = factor) -> TowerFactorization:
    """Tower factorization of ``n >= 1``.

    >>> render_tower(tower_factorize(625))
    '5^(2^(2))'
    """
    if n < 1:
        raise ValueError("tower factorization is defined for n >= 1")
    if n == 1:
        return ONE
    return tower_from_factorization(factorizer(n), factorizer)


def tower_primes(n: int, factorizer: Factorizer = factor) -> set[int]:
    """All primes appearing anywhere in the tower factorization of ``n``."""
    return tower_factorize(n, factorizer).primes()


def render_tower(t: TowerFactorization) -> str:
    """Compact rendering: ``"1"``, ``"7"``, ``"2^(2^(2))*3^(2)"``. No whitespace."""
    if t.is_one:
        return "1"
    parts = []
    for p, sub in t.factors:
        parts.append(str(p) if sub.is_one else f"{p}^({render_tower(sub)})")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Membership


def require_prime(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")


@dataclass(frozen=True, eq=False)
class MembershipTable:
    """Characteristic bits of M(q) on ``0..cutoff``."""

    q: int
    cutoff: int
    bits: np.ndarray

    def __contains__(self, m: int) -> bool:
        return 0 <= m <= self.cutoff and bool(self.bits[m])

    @classmethod
    def build(cls, q: int, cutoff: int = MEMO_CUTOFF) -> MembershipTable:
        """Fill the table in increasing order; every exponent of m is below m."""
        require_prime(q)
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        bits = np.zeros(cutoff + 1, dtype=bool)
        spf = list(range(cutoff + 1))
        for p in range(2, math.isqrt(cutoff) + 1):
            if spf[p] == p:
                for k in range(p * p, cutoff + 1, p):
                    if spf[k] == k:
                        spf[k] = p
        for m in range(2, cutoff + 1):
            if m % q == 0:
                bits[m] = True
                continue
            n = m
            while n > 1:
                p = spf[n]
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                if bits[e]:
                    bits[m] = True
                    break
        bits.setflags(write=False)
        return cls(q, cutoff, bits)

    def exponents_in(self, limit: int) -> list[int]:
        """Members ``e`` with ``2 <= e <= limit``."""
        limit = min(limit, self.cutoff)
        return [int(e) for e in np.flatnonzero(self.bits[: limit + 1])]


_tables: dict[int, MembershipTable] = {}
_tables_lock = threading.Lock()


def membership_table(q: int) -> MembershipTable:
    """Shared, immutable table for ``q`` covering ``0..MEMO_CUTOFF``."""
    with _tables_lock:
        t = _tables.get(q)
        if t is None:
            t = _tables[q] = MembershipTable.build(q, MEMO_CUTOFF)
        return t


def is_member(n: int, q: int) -> bool:
    """Whether ``n`` lies in M(q).

    >>> is_member(9, 2), is_member(1, 2), is_member(33787663, 5)
    (True, False, False)
    """
    table = membership_table(q)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= table.cutoff:
        return bool(table.bits[n])
    if n % q == 0:
        return True
    return any(is_member(e, q) for _, e in factor(n))


def segment_membership(lo: int, hi: int, q: int, table: MembershipTable | None = None,
                       base_primes: Sequence[int] | None = None) -> np.ndarray:
    """Membership bits of M(q) for every integer in ``[lo, hi)``.

    Marks multiples of ``q`` and, for each prime ``p`` and member exponent
    ``e``, the integers whose ``p``-adic valuation is exactly ``e``. This is
    the definition read column-wise: n is a member iff q | n or some exponent
    of n is a member, and exponent 1 never is.
    """
    if lo < 0 or hi < lo:
        raise ValueError("need 0 <= lo <= hi")
    out = np.zeros(hi - lo, dtype=bool)
    if hi <= 2:
        return out
    if table is None:
        table = membership_table(q)
    top = hi - 1
    if base_primes is None:
        base_primes = primes_up_to(math.isqrt(top))
    max_exp = top.bit_length()
    exps = table.exponents_in(max_exp)
    if max_exp > table.cutoff:
        raise CapacityError("membership table too small for this range")
    first = -(-lo // q) * q
    out[first - lo :: q] = True
    for p in base_primes:
        if p * p > top:
            break
        for e in exps:
            pe = p**e
            if pe > top:
                break
            start = -(-lo // pe) * pe
            if start > top:
                continue
            k0 = start // pe
            ks = np.arange(k0, top // pe + 1, dtype=np.int64)
            ks = ks[ks % p != 0]
            out[ks * pe - lo] = True
    # 0 and 1 are never members
    out[: max(0, 2 - lo)] = False
    return out


def member_set(q: int, lo: int, hi: int, complement: bool = False) -> list[int]:
    """Ascending members of M(q) (or of its complement) in ``[lo, hi]``.

    The complement includes 0 and 1 when they are in range.
    """
    require_prime(q)
    if not 0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    if hi > MEMBER_SET_CEILING:
        raise CapacityError(f"hi must be <= {MEMBER_SET_CEILING}")
    bits = segment_membership(lo, hi + 1, q)
    if complement:
        bits = ~bits
    return (np.flatnonzero(bits) + lo).tolist()
