"""Ergodic rate, area spectral efficiency, deployment gain and dense-network limits.

The per-cell ergodic rate is the integral of the coverage curve,

    tau = (1/ln 2) int_{t0}^inf pc(e^t - 1) dt,   t0 = ln(1 + gamma0),

which equals E[(log2(1 + SINR) - log2(1 + gamma0))^+].  The area spectral
efficiency is density * tau.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from . import _kernels as K
from . import analytic, specfun
from .analytic import DEFAULT_QUAD, QuadratureControl, Scenario
from .errors import ConvergenceError, DomainError, UnsupportedCaseError
from .geometry import SQRT3, Deployment, DeploymentKind, interference_bounds_hex
from .pathloss import PathLossKind, PathLossModel

LN2 = math.log(2.0)
# the outer integral stops where the coverage falls below this value
PC_FLOOR = 1e-10


class RateMethod(str, enum.Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"
    LIMIT = "limit"
    BOUND_PAIR = "bound_pair"


@dataclass(frozen=True)
class RateResult:
    value: float
    method: RateMethod
    error_estimate: float = 0.0
    lower: Optional[float] = None
    upper: Optional[float] = None

    def __post_init__(self):
        if self.value < 0:
            raise DomainError(f"rate must be >= 0, got {self.value}")
        if self.method is RateMethod.BOUND_PAIR:
            if self.lower is None or self.upper is None or self.lower > self.upper:
                raise DomainError("bound pair needs lower <= upper")

    def scaled(self, factor: float) -> "RateResult":
        return RateResult(
            self.value * factor, self.method, self.error_estimate * factor,
            None if self.lower is None else self.lower * factor,
            None if self.upper is None else self.upper * factor)


def _t_max(pc_of_t: Callable[[float], float], t0: float) -> float:
    """A point beyond which pc(e^t - 1) < PC_FLOOR."""
    span = 1.0
    if pc_of_t(t0 + span) >= PC_FLOOR:
        while pc_of_t(t0 + span) >= PC_FLOOR and span < 700.0:
            span *= 2.0
        return t0 + span
    while span > 1e-12:
        span *= 0.5
        if pc_of_t(t0 + span) >= PC_FLOOR:
            return t0 + 2.0 * span
    return t0 + span


def _rate_integral(pc_of_t, t0: float, quad: QuadratureControl, levels: int = 10):
    """(1/ln 2) int_{t0}^inf pc(e^t - 1) dt with panels graded toward t0."""
    t_end = _t_max(pc_of_t, t0)
    span = t_end - t0
    edges = [t0] + [t0 + span * 2.0 ** -j for j in range(levels, -1, -1)]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(pc_of_t, lo, hi, epsabs=quad.abs_tol,
                                epsrel=quad.rel_tol, limit=quad.max_subdivisions)
        total += val
        err += e
    # remainder beyond t_end is below PC_FLOOR per unit t and decays fast
    return total / LN2, (err + PC_FLOOR) / LN2


def _t0(scenario: Scenario) -> float:
    return math.log1p(scenario.gamma0)


def rate_closed_form_available(scenario: Scenario) -> bool:
    dep, model = scenario.deployment, scenario.model
    return (dep.kind is DeploymentKind.LINE and model.alpha == 2.0
            and model.kind is not PathLossKind.L2 and scenario.noise == 0.0)


def ergodic_rate(scenario: Scenario, method: str = "auto",
                 quad: QuadratureControl = DEFAULT_QUAD) -> RateResult:
    """Per-cell ergodic rate in bits/s/Hz.

    ``method``: "quadrature" integrates the general coverage expression;
    "closed_form" uses the closed-form coverage (or the double integral for
    regular 1D networks with alpha = 2); "auto" prefers the closed form.
    """
    method = str(method).lower()
    if method not in ("auto", "quadrature", "closed_form"):
        raise DomainError(f"unknown method {method!r}")
    if method == "auto":
        use_closed = analytic.closed_form_available(scenario)
    else:
        use_closed = method == "closed_form"
    if use_closed and rate_closed_form_available(scenario):
        model = scenario.model
        val = rate_closed_form_reg1d(scenario.density, model.h, model.kind,
                                     model.alpha, gamma0=scenario.gamma0, quad=quad)
        return RateResult(val, RateMethod.CLOSED_FORM, 1e-8)
    if use_closed:
        if not analytic.closed_form_available(scenario):
            raise UnsupportedCaseError(f"no closed form for {scenario}")
        log_pc = analytic.log_coverage_closed_form
        kind = RateMethod.CLOSED_FORM
    else:
        kind = RateMethod.QUADRATURE

        def log_pc(sc, T):
            return analytic.log_coverage_probability(sc, T, quad)

    def pc_of_t(t):
        return math.exp(log_pc(scenario, math.expm1(t)))

    value, err = _rate_integral(pc_of_t, _t0(scenario), quad)
    return RateResult(max(value, 0.0), kind, err)


def ase(scenario: Scenario, method: str = "auto",
        quad: QuadratureControl = DEFAULT_QUAD) -> RateResult:
    """Area spectral efficiency density * tau (bits/s/Hz/m^d)."""
    return ergodic_rate(scenario, method, quad).scaled(scenario.density)


def deployment_gain(density: float, model: PathLossModel, d: int, noise: float = 0.0,
                    mu: float = 1.0, method: str = "auto",
                    quad: QuadratureControl = DEFAULT_QUAD) -> float:
    """tau(regular lattice) / tau(PPP) at the same density."""
    reg = Scenario(Deployment.regular_for(d, density), model, mu, noise)
    ppp = Scenario(Deployment(DeploymentKind.PPP, d, density), model, mu, noise)
    return ergodic_rate(reg, method, quad).value / ergodic_rate(ppp, method, quad).value


def _semi_infinite(f, a: float, scale: float, quad: QuadratureControl,
                   max_panels: int = 200) -> float:
    """int_a^inf f over doubling panels; the geometric decay of the panel
    contributions extrapolates the remainder once it is negligible."""
    def panel(lo, hi):
        return integrate.quad(f, lo, hi, epsabs=0.1 * quad.abs_tol, epsrel=quad.rel_tol,
                              limit=quad.max_subdivisions)[0]

    total = panel(a, a + scale)
    lo, prev = a + scale, None
    for _ in range(max_panels):
        hi = a + 2.0 * (lo - a)
        c = panel(lo, hi)
        total += c
        if prev is not None and abs(c) <= 1e-12 * abs(total):
            q = c / prev if prev else 0.0
            if 0.0 < q < 1.0:
                total += c * q / (1.0 - q)
            return total
        prev, lo = c, hi
    raise ConvergenceError("semi-infinite rate integral did not converge")


def rate_closed_form_reg1d(density: float, h: float, kind, alpha: float = 2.0,
                           gamma0: float = 0.0,
                           quad: QuadratureControl = DEFAULT_QUAD) -> float:
    """Rate of the noise-less LINE network with alpha = 2 as a double integral.

    l0: (2 / (pi ln 2)) int_{sqrt(gamma0)}^inf int_0^pi k (1 - cos x)/(cosh(kx) - cos x) dx dk
    l1: (1 / (pi ln 2)) int_{gamma0}^inf int_0^pi
            (cosh b - cos x)/(cosh sqrt(b^2 (1+T) + x^2 T) - cos x) dx dT,
        b = 2 pi density h.
    The inner integrals are evaluated by graded Gauss-Legendre rules.
    """
    kind = PathLossKind(kind)
    if alpha != 2.0:
        raise UnsupportedCaseError("the regular 1D rate double integral needs alpha = 2")
    if kind is PathLossKind.L2:
        raise UnsupportedCaseError("no regular 1D rate closed form for l2")
    if not density > 0:
        raise DomainError("density must be positive")
    if kind is PathLossKind.L0:
        h = 0.0
    bprime = 2.0 * math.pi * density * h

    def inner(T):
        u, w = K.graded_rule(T ** -0.5, 12)
        x = math.pi * u
        lr = analytic._line_closed_log_integrand(T, bprime, x) - math.log1p(T)
        return math.pi * float(np.dot(w, np.exp(lr)))

    if bprime == 0.0:
        def f(k):
            return k * inner(k * k) if k > 0 else 0.0
        val = _semi_infinite(f, math.sqrt(gamma0), 1.0, quad)
        return 2.0 * val / (math.pi * LN2)
    scale = min(1.0, 2.0 / bprime)
    val = _semi_infinite(lambda T: inner(T) if T > 0 else 1.0, gamma0, scale, quad)
    return val / (math.pi * LN2)


# ---------------------------------------------------------------- limits


def _lattice_interference_1d(model: PathLossModel, isd: float) -> float:
    """2 sum_{i>=1} l(i isd) for a bounded model."""
    a = model.alpha
    if model.kind is PathLossKind.L1:
        return 2.0 * isd ** -a * specfun.sum_inv_power(model.h / isd, a / 2.0)
    n = int(math.floor(model.h / isd))
    return 2.0 * (n * model.h ** -a + isd ** -a * specfun.hurwitz_zeta(a, n + 1.0))


def tau0_collocated(scenario: Scenario) -> RateResult:
    """Rate of a user collocated with its BS on a lattice, without fading.

    SINR = l(0) / (I + mu sigma2) with I the interference from all other
    sites.  In 2D the hex ring-sum bounds give a bound pair on the rate.
    """
    dep, model = scenario.deployment, scenario.model
    if not model.bounded:
        raise DomainError("the collocated rate needs a bounded path loss (l1/l2, h > 0)")
    if not dep.regular:
        raise UnsupportedCaseError("the collocated rate is defined for lattices only")
    model.check_dimension(dep.dimension)
    peak = model.peak
    extra = scenario.mu * scenario.noise
    if dep.dimension == 1:
        interference = _lattice_interference_1d(model, dep.isd)
        return RateResult(math.log2(1.0 + peak / (interference + extra)),
                          RateMethod.CLOSED_FORM)
    low_i, high_i = interference_bounds_hex(model, dep.isd)
    lower = math.log2(1.0 + peak / (high_i + extra))
    upper = math.log2(1.0 + peak / (low_i + extra))
    return RateResult(0.5 * (lower + upper), RateMethod.BOUND_PAIR,
                      0.5 * (upper - lower), lower, upper)


_ASE_LIMIT_1D = {2.0: 1.0, 4.0: 2.0, 6.0: 8.0 / 3.0}


def ase_limit_1d(alpha: float, h: float) -> float:
    """Dense-network ASE limit of 1D networks: {1, 2, 8/3} / (pi h ln 2)."""
    if not h > 0:
        raise DomainError("h must be positive")
    coef = _ASE_LIMIT_1D.get(float(alpha))
    if coef is None:
        raise UnsupportedCaseError(f"1D ASE limit is available for alpha in {{2, 4, 6}}, got {alpha}")
    return coef / (math.pi * h * LN2)


def ase_lower_bound(d: int, alpha: float, h: float) -> float:
    """Closed-form lower bound on the dense-network ASE.

    1D: 1 / (2 ln2 h (1 + Gamma(alpha-1)/Gamma(alpha)))
    2D: 2 sqrt(3) / (12 ln2 h^2 (1 + 2 Gamma(alpha-2)/Gamma(alpha-1)))
    """
    if not h > 0:
        raise DomainError("h must be positive")
    if d == 1:
        if not alpha > 1:
            raise DomainError("1D bound needs alpha > 1")
        ratio = math.exp(special.gammaln(alpha - 1.0) - special.gammaln(alpha))
        return 1.0 / (2.0 * LN2 * h * (1.0 + ratio))
    if d == 2:
        if not alpha > 2:
            raise DomainError("2D bound needs alpha > 2")
        ratio = math.exp(special.gammaln(alpha - 2.0) - special.gammaln(alpha - 1.0))
        return 2.0 * SQRT3 / (12.0 * LN2 * h * h * (1.0 + 2.0 * ratio))
    raise DomainError("d must be 1 or 2")


def ase_bounds_2d_alpha4(h: float) -> tuple[float, float]:
    """Bounds on the dense-network ASE of 2D networks with alpha = 4."""
    if not h > 0:
        raise DomainError("h must be positive")
    return (2.0 * SQRT3 / (12.0 * LN2 * h * h), 2.0 * SQRT3 / (9.0 * LN2 * h * h))


def ase_dense_limit(d: int, alpha: float, h: float) -> float:
    """Limit of density * tau as density -> inf under l1, any alpha > d.

    With the antenna height fixed, interference from sites within ~h is
    effectively a continuum, giving SINR ~ h^d / (c density) and
    1D: Gamma(alpha/2) / (ln2 h sqrt(pi) Gamma((alpha-1)/2)),
    2D: (alpha - 2) / (2 pi ln2 h^2).
    """
    if not h > 0:
        raise DomainError("h must be positive")
    if not alpha > d:
        raise DomainError("alpha must exceed d")
    if d == 1:
        return math.exp(special.gammaln(alpha / 2.0) - special.gammaln((alpha - 1.0) / 2.0)) \
            / (LN2 * h * math.sqrt(math.pi))
    if d == 2:
        return (alpha - 2.0) / (2.0 * math.pi * LN2 * h * h)
    raise DomainError("d must be 1 or 2")
