"""Sequential species sampling under the two-parameter Poisson-Dirichlet
process, posterior and plug-in entropy estimators, and the discovery
functional whose increments vanish exactly at new-species discoveries."""

from .entropy import (
    ExtremalConfig,
    extremal_config,
    global_max_entropy,
    global_min_entropy,
    mle_entropy,
    posterior_mean_entropy,
    prior_mean_entropy,
    weighted_posterior_entropy,
)
from .functionals import (
    DiscoveryDecomposition,
    StepMismatchError,
    StepVariation,
    delta_step,
    discovery_decomposition,
    eta_step,
    frequentist_delta,
    frequentist_functional,
    frequentist_weighted_entropy_step,
    functional_A,
    max_entropy_weighted_step,
)
from .general_entropy import (
    GeneralEntropySpec,
    check_admissibility,
    frequentist_spec,
    general_delta,
    general_entropy,
    general_weighted_entropy_step,
    pdp_spec,
)
from .sampler import (
    InvalidStateError,
    PdpParams,
    PriorWeights,
    SampleState,
    make_rng,
    predictive_probabilities,
    sample_gem_weights,
    simulate_batch,
    simulate_trajectory,
    step,
)
from .special_fn import DomainError, digamma, digamma_log_bounds, digamma_weighted_step

__version__ = "0.1.0"
