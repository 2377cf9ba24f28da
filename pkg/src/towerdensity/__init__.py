"""Tower factorizations of integers and the densities of the sets M(q)."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundParams,
    DensityInterval,
    asymptotic_interval,
    best_interval,
    bound_lower_B,
    bound_lower_S,
    bound_lower_zeta,
    bound_upper_A,
    factor_sum,
)
from .primes import factor, first_k_primes, is_prime, spf_sieve  # noqa: E402
from .rigor import DirectedDecimal, Direction, zeta_enclosure, zeta_enclosure_em  # noqa: E402
from .scan import ScanCheckpoint, brute_force_count, density_scan  # noqa: E402
from .tower import (  # noqa: E402
    MembershipTable,
    TowerFactorization,
    is_member,
    member_set,
    render_tower,
    tower_factorize,
    tower_primes,
)
