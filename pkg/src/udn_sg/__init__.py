"""Coverage, rate and area spectral efficiency of ultra-dense networks.

Analytic (quadrature and closed-form) and Monte Carlo evaluation of the
SINR coverage probability for Poisson and lattice base-station deployments
in one and two dimensions under unbounded and bounded path loss.
"""
from .analytic import (DEFAULT_QUAD, QuadratureControl, Scenario, closed_form_available,
                       countering_height, coverage_closed_form, coverage_probability,
                       laplace_interference, log_coverage_probability, rho)
from .errors import (ConvergenceError, DivergenceError, DomainError, SingularityError,
                     TruncationError, UDNError, UnsupportedCaseError)
from .geometry import (Deployment, DeploymentKind, PointSet, density_from_isd,
                       hex_lattice, interference_bounds_hex, isd_from_density,
                       nearest_distance_cdf, nearest_distance_pdf, sample_deployment)
from .mcsim import (Association, Fading, MCConfig, MCEstimate, simulate_coverage,
                    simulate_rate, simulate_sinr)
from .pathloss import PathLossKind, PathLossModel, gain
from .rate import (RateResult, ase, ase_bounds_2d_alpha4, ase_dense_limit, ase_limit_1d,
                   ase_lower_bound, deployment_gain, ergodic_rate, rate_closed_form_reg1d,
                   tau0_collocated)
from .specfun import (SeriesControl, hurwitz_zeta, sum_inv_quadratic, sum_ring_power,
                      tail_sum_quartic)
from .sweep import SweepConfig, reproduce_figure, run_sweep

__version__ = "0.1.0"
