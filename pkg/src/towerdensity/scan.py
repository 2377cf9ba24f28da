"""Empirical density of M(q) over initial segments [1, N]."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import CapacityError
from .primes import primes_up_to, trial_division_factor
from .tower import require_prime, membership_table, segment_membership, tower_factorize

SCAN_CEILING = 10**8
BRUTE_FORCE_CEILING = 10**6
SEGMENT_LENGTH = 2**20
DENSITY_PLACES = 10


@dataclass(frozen=True)
class ScanCheckpoint:
    n: int
    count: int
    density: str

    def as_row(self) -> list:
        return [self.n, self.count, self.density]


def format_density(count: int, n: int, places: int = DENSITY_PLACES) -> str:
    """``count/n`` to ``places`` decimals, round-half-even, from exact integers."""
    scaled, rem = divmod(count * 10**places, n)
    if 2 * rem > n or (2 * rem == n and scaled % 2 == 1):
        scaled += 1
    whole, frac = divmod(scaled, 10**places)
    return f"{whole}.{frac:0{places}d}"


def parse_schedule(spec: str | Sequence[int] | None, n_max: int) -> list[int]:
    """Resolve a checkpoint schedule into sorted checkpoint values ending at ``n_max``.

    Accepted forms: ``None``/``"pow10"`` (powers of ten), ``"every:K"``, an
    explicit comma list ``"10,100,5000"`` (optionally prefixed ``list:``), or a
    sequence of ints.
    """
    if spec is None or spec == "pow10":
        points = [10**k for k in range(len(str(n_max))) if 10**k <= n_max]
    elif isinstance(spec, str) and spec.startswith("every:"):
        step = int(spec[len("every:"):])
        if step < 1:
            raise ValueError("every:K needs K >= 1")
        points = list(range(step, n_max + 1, step))
    else:
        if isinstance(spec, str):
            body = spec[len("list:"):] if spec.startswith("list:") else spec
            points = [int(x) for x in body.split(",") if x.strip()]
        else:
            points = [int(x) for x in spec]
        bad = [x for x in points if not 1 <= x <= n_max]
        if bad:
            raise ValueError(f"checkpoints outside [1, {n_max}]: {bad[:5]}")
    return sorted(set(points) | {n_max})


def density_scan(q: int, n_max: int, checkpoints=None, threads: int = 1,
                 segment_length: int = SEGMENT_LENGTH,
                 ceiling: int = SCAN_CEILING) -> list[ScanCheckpoint]:
    """Count members of M(q) in [1, N] at each checkpoint N.

    Segments are independent and may run on a thread pool; their counts are
    merged in segment order, so the output does not depend on ``threads``.
    """
    require_prime(q)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > ceiling:
        raise CapacityError(f"n_max must be <= {ceiling}")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    points = parse_schedule(checkpoints, n_max)
    table = membership_table(q)
    base = primes_up_to(math.isqrt(n_max))
    bounds = [(lo, min(lo + segment_length, n_max + 1))
              for lo in range(1, n_max + 1, segment_length)]
    pts = np.asarray(points, dtype=np.int64)

    def work(seg):
        lo, hi = seg
        bits = segment_membership(lo, hi, q, table, base)
        cum = np.cumsum(bits, dtype=np.int64)
        local = pts[(pts >= lo) & (pts < hi)]
        return int(cum[-1]), [(int(n), int(cum[n - lo])) for n in local]

    if threads == 1:
        results = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, bounds))
    out = []
    running = 0
    for total, local in results:
        for n, c in local:
            out.append(ScanCheckpoint(n, running + c, format_density(running + c, n)))
        running += total
    return out


def brute_force_indicator(q: int, n_max: int) -> list[bool]:
    """Per-n membership via a full tower built from trial division; index 0 is n=0."""
    require_prime(q)
    if n_max > BRUTE_FORCE_CEILING:
        raise CapacityError(f"n_max must be <= {BRUTE_FORCE_CEILING}")
    out = [False] * (n_max + 1)
    for n in range(2, n_max + 1):
        out[n] = q in tower_factorize(n, trial_division_factor).primes()
    return out


def brute_force_count(q: int, n_max: int) -> int:
    """Independent count of M(q) in [1, n_max]; shares no sieve state with the scan."""
    return sum(brute_force_indicator(q, n_max))


def write_csv(checkpoints: Iterable[ScanCheckpoint], fp: IO[str]) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["N", "count", "density"])
    for c in checkpoints:
        w.writerow(c.as_row())
