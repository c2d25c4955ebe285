"""qdl-lab: multiphoton quantum-data-locking toolkit.

Fock-space combinatorics, permanent-based linear-optics simulation,
seeded Monte Carlo estimation of scrambling statistics, closed-form
key-size and rate-loss bounds, and an end-to-end protocol simulator.
"""

__version__ = "0.1.0"

from .bounds import (
    KeySizeReport,
    SecurityParams,
    failure_prob_bounds,
    k_epsilon_multi,
    k_epsilon_single,
    key_consumption_rate,
    mutual_info_lossy,
    net_rate,
    rate_loss_curve,
)
from .errors import CacheMissError, DomainError, ResourceError
from .fock import (
    CodeBook,
    ModeConfig,
    PhotonPattern,
    dim_hilbert,
    enumerate_basis,
    enumerate_patterns,
    log2_dim_hilbert,
    log2_num_codewords,
    num_codewords,
    pattern_of,
    rank,
    sample_codebook,
    unrank,
)
from .linop import (
    UnitaryMatrix,
    dagger,
    haar_unitary,
    output_distribution,
    permanent,
    transition_amplitude,
)
from .mc import (
    GammaRecord,
    MomentEstimate,
    conjectured_c_min,
    estimate_c_q,
    estimate_gamma_q,
    estimate_moments,
    estimate_raw_c_q,
    gamma_bound,
    no_collision_values,
)
from .protocol import (
    ProtocolConfig,
    TrialRecord,
    TrialSummary,
    decode_with_key,
    empirical_mutual_info,
    encode,
    eavesdrop_photodetect,
    gen_unitary_pool,
    lossy_channel,
    run_trials,
)
