"""First-passage analytics for time-changed Brownian motion and the
structural credit models built on them."""
from .brownian import BrownianParams, fp_cdf, fp_laplace_exponent, survival_level_joint
from .credit import (
    FirmCredit,
    cds_legs,
    cds_spread,
    default_leg,
    default_probability,
    premium_leg,
    recovery_bond,
    riskfree_bond,
    yield_spread,
    zero_recovery_bond,
)
from .errors import (
    DomainError,
    LatticeError,
    NumericalError,
    QuadratureError,
    ScenarioError,
    TCBMError,
)
from .first_passage import (
    defaultable_density,
    defaulted_density,
    fp2_cdf,
    fp2_cdf_by_density,
    survival_char_fn,
)
from .montecarlo import SimConfig, mc_fp1_vs_fp2, mc_fp2, mc_price
from .portfolio import (
    FirmFactorSpec,
    PortfolioSpec,
    joint_default_prob,
    loss_distribution,
    mixing_density,
)
from .quadrature import QuadratureConfig
from .scenario import Scenario, emit, load_scenario, parse_scenario
from .timechange import (
    ConvexCombination,
    DeterministicClock,
    ExponentialSubordinator,
    GammaSubordinator,
    IGSubordinator,
    IntegratedCIR,
    IntegratedOUJump,
    TimeChange,
    combine,
    cumulants,
    laplace_exponent,
    mean_rate,
    tcbm_char_fn,
)

__version__ = "0.1.0"
