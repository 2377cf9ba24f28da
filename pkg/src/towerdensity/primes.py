"""Prime sieves, deterministic 64-bit primality, and integer factorization."""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError

SIEVE_CEILING = 10**8
DEFAULT_SIEVE_LIMIT = 10**7

# Deterministic for n < 3.3e24 (Sorenson & Webster), which covers 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
_RHO_SEED = 20160425


@dataclass(frozen=True, eq=False)
class SpfTable:
    """Smallest-prime-factor table on ``0..limit`` (entries 0 and 1 unused)."""

    limit: int
    spf: np.ndarray

    def __post_init__(self):
        self.spf.setflags(write=False)

    def __getitem__(self, n: int) -> int:
        return int(self.spf[n])

    def factor(self, n: int) -> list[tuple[int, int]]:
        if not 1 <= n <= self.limit:
            raise ValueError(f"{n} outside table range 1..{self.limit}")
        out: list[tuple[int, int]] = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return np.flatnonzero((self.spf == idx) & (idx >= 2))


def spf_sieve(limit: int, ceiling: int = SIEVE_CEILING) -> SpfTable:
    """Build a smallest-prime-factor table by an Eratosthenes-style sieve.

    Only composites not yet claimed by a smaller prime are written, so every
    entry ends up holding its least prime divisor.
    """
    if limit < 2 or limit > ceiling:
        raise CapacityError(f"sieve limit must be in [2, {ceiling}], got {limit}")
    dtype = np.int32 if limit < 2**31 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset
    spf[0] = 0
    spf[1] = 1
    return SpfTable(limit, spf)


_default_lock = threading.Lock()
_default_table: SpfTable | None = None
_default_limit = DEFAULT_SIEVE_LIMIT


def set_default_sieve_limit(limit: int) -> None:
    """Change the limit used for the lazily built shared sieve."""
    global _default_table, _default_limit
    if limit < 2 or limit > SIEVE_CEILING:
        raise CapacityError(f"sieve limit must be in [2, {SIEVE_CEILING}], got {limit}")
    with _default_lock:
        _default_limit = limit
        _default_table = None


def default_table() -> SpfTable:
    global _default_table
    with _default_lock:
        if _default_table is None:
            _default_table = spf_sieve(_default_limit)
        return _default_table


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).tolist()


@lru_cache(maxsize=16)
def _first_k_primes(k: int) -> tuple[int, ...]:
    if k == 0:
        return ()
    if k < 6:
        bound = 15
    else:
        # Rosser: p_k < k (ln k + ln ln k) for k >= 6
        bound = int(k * (math.log(k) + math.log(math.log(k)))) + 1
    return tuple(primes_up_to(bound)[:k])


def first_k_primes(k: int) -> list[int]:
    """Return the ``k`` smallest primes in increasing order."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return list(_first_k_primes(k))


def is_prime(n: int) -> bool:
    """Primality test; deterministic Miller-Rabin for every n < 2^64."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    # n odd composite, not a prime power of a small prime
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, rng: random.Random, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _pollard_brent(m, rng)
        stack.extend((d, m // d))


def trial_division_factor(n: int) -> list[tuple[int, int]]:
    """Factor ``n`` by plain trial division. Slow; used as an oracle path."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def factor(n: int, table: SpfTable | None = None) -> list[tuple[int, int]]:
    """Prime factorization of ``n`` as ``[(p, e), ...]`` with increasing ``p``.

    Uses the smallest-prime-factor table when ``n`` fits in it, otherwise
    trial division by small primes followed by Miller-Rabin and a fixed-seed
    Pollard-Brent split. Correct for all ``1 <= n < 2**64``; larger inputs
    are handled on a best-effort basis.

    >>> factor(144)
    [(2, 4), (3, 2)]
    >>> factor(33787663)
    [(7, 1), (13, 6)]
    """
    if n < 1:
        raise ValueError("factor() is defined for n >= 1")
    if table is None:
        table = default_table()
    if n <= table.limit:
        return table.factor(n)
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n <= table.limit:
            for p, e in table.factor(n):
                out[p] = out.get(p, 0) + e
        else:
            _split_large(n, random.Random(_RHO_SEED), out)
    return sorted(out.items())
