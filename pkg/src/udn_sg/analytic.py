"""Analytical coverage probability under Rayleigh fading.

The typical user at the origin is served by its nearest BS at distance r and
is covered when SINR > T:

    pc(T) = int E[exp(-mu T sigma2 / l(r))] L_I(mu T / l(r)) f(r) dr

The Laplace transform of the interference L_I is an exponential of a radial
integral for Poisson deployments and an infinite product over the lattice for
regular ones.  Lattice products are evaluated in log form by the smooth-window
summation in ``_kernels``; results are accumulated in log space so that very
small coverage values (dense networks with elevated antennas) keep their
relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

from . import _kernels as K
from .errors import DivergenceError, DomainError, UnsupportedCaseError
from .geometry import SQRT3, Deployment, DeploymentKind
from .pathloss import PathLossKind, PathLossModel


@dataclass(frozen=True)
class QuadratureControl:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    # relative size of the last retained lattice product term
    product_truncation: float = 1e-12
    # largest normalized radius explored by the lattice sums
    max_lattice_radius: float = 1e15

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "product_truncation", "max_lattice_radius"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")

    @property
    def x_switch(self) -> float:
        # the 4-term small-x series leaves an O(x^5) remainder
        return self.product_truncation ** 0.2


DEFAULT_QUAD = QuadratureControl()


@dataclass(frozen=True)
class Scenario:
    deployment: Deployment
    model: PathLossModel
    mu: float = 1.0
    noise: float = 0.0
    gamma0: float = 0.0

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        if not self.noise >= 0:
            raise DomainError(f"noise power must be >= 0, got {self.noise}")
        if not self.gamma0 >= 0:
            raise DomainError(f"gamma0 must be >= 0, got {self.gamma0}")

    @property
    def dimension(self) -> int:
        return self.deployment.dimension

    @property
    def density(self) -> float:
        return self.deployment.density

    def with_density(self, density: float) -> "Scenario":
        return replace(self, deployment=self.deployment.with_density(density))

    def with_model(self, model: PathLossModel) -> "Scenario":
        return replace(self, model=model)

    def with_deployment(self, deployment: Deployment) -> "Scenario":
        return replace(self, deployment=deployment)

    def to_dict(self) -> dict:
        return {"deployment": self.deployment.to_dict(), "model": self.model.to_dict(),
                "mu": self.mu, "noise": self.noise, "gamma0": self.gamma0}

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(Deployment.from_dict(data["deployment"]),
                   PathLossModel.from_dict(data["model"]),
                   float(data.get("mu", 1.0)), float(data.get("noise", 0.0)),
                   float(data.get("gamma0", 0.0)))


def _check_threshold(T) -> float:
    T = float(T)
    if not T > 0:
        raise DomainError(f"SINR threshold must be positive, got {T}")
    return T


def _effective_h(model: PathLossModel) -> float:
    """Height entering the formulas; L0 behaves as h = 0."""
    if model.kind is PathLossKind.L2:
        raise UnsupportedCaseError(
            "analytic coverage is available for l0 and l1 only; use mcsim for l2")
    return model.h if model.kind is PathLossKind.L1 else 0.0


def rho(T: float, alpha: float, d: int) -> float:
    """T^(d/alpha) int_{T^(-d/alpha)}^inf du / (1 + u^(alpha/d)).

    With p = alpha/d the integral reduces to an incomplete beta function,
    rho = T^(1/p) / p * B(T/(1+T); 1 - 1/p, 1/p).
    """
    T = float(T)
    if not T >= 0:
        raise DomainError(f"T must be >= 0, got {T}")
    if not alpha > d:
        raise DivergenceError(f"rho diverges for alpha={alpha} <= d={d}")
    if T == 0.0:
        return 0.0
    p = alpha / d
    a, b = 1.0 - 1.0 / p, 1.0 / p
    if T <= 1.0:
        inc = special.betainc(a, b, T / (1.0 + T))
    else:
        # complement keeps full precision when T/(1+T) rounds toward 1
        inc = 1.0 - special.betainc(b, a, 1.0 / (1.0 + T))
    return T ** (1.0 / p) / p * inc * special.beta(a, b)


def rho_quad(T: float, alpha: float, d: int) -> float:
    """rho by direct adaptive quadrature (reference implementation)."""
    if not alpha > d:
        raise DivergenceError(f"rho diverges for alpha={alpha} <= d={d}")
    p = alpha / d
    lower = T ** (-1.0 / p)
    val, _ = integrate.quad(lambda u: 1.0 / (1.0 + u ** p), lower, np.inf,
                            epsabs=1e-14, epsrel=1e-12, limit=200)
    return T ** (1.0 / p) * val


# ---------------------------------------------------------------- Laplace


def laplace_interference(scenario: Scenario, s: float, r: float, theta=None,
                         quad: QuadratureControl = DEFAULT_QUAD) -> float:
    """E[exp(-s I)] for the interference seen by a user at distance r from its BS.

    For HEX, ``theta`` in [0, pi/3] is the user's angle measured from a cell
    vertex (default: the cell apothem, theta = pi/6).
    """
    return math.exp(log_laplace_interference(scenario, s, r, theta, quad))


def log_laplace_interference(scenario: Scenario, s: float, r: float, theta=None,
                             quad: QuadratureControl = DEFAULT_QUAD) -> float:
    s = float(s)
    r = float(r)
    if not s >= 0:
        raise DomainError("s must be >= 0")
    if not r >= 0:
        raise DomainError("r must be >= 0")
    if s == 0.0:
        return 0.0
    dep, model = scenario.deployment, scenario.model
    d = dep.dimension
    model.check_dimension(d)
    h = _effective_h(model)
    alpha = model.alpha
    if dep.kind is DeploymentKind.PPP:
        if r == 0.0 and h == 0.0:
            raise DomainError("r must be > 0 for an unbounded path loss")
        # work in units where the density is one
        unit = dep.density ** (-1.0 / d)
        hn, rn = h / unit, r / unit
        log_k = math.log(s / scenario.mu) - alpha * math.log(unit)
        lo = rn if rn > 0 else max(hn, 1.0) * 1e-8
        integral = K.radial_integral("frac", d, alpha, hn, log_k, lo, quad.x_switch,
                                     max_radius=quad.max_lattice_radius)[0]
        return -(2.0 if d == 1 else 2.0 * math.pi) * integral
    isd = dep.isd
    hn, a = h / isd, r / isd
    if dep.kind is DeploymentKind.LINE:
        if a > 0.5:
            raise DomainError("r lies outside the serving cell (r > isd/2)")
        user = np.array([[a]])
    else:
        theta = math.pi / 6.0 if theta is None else float(theta)
        if not 0.0 <= theta <= math.pi / 3.0:
            raise DomainError("theta must lie in [0, pi/3]")
        if a > 0.5 / math.sin(theta + math.pi / 3.0) * (1 + 1e-12):
            raise DomainError("r lies outside the serving cell")
        phi = theta - math.pi / 6.0
        user = np.array([[a * math.cos(phi), a * math.sin(phi)]])
    log_k = math.log(s / scenario.mu) - alpha * math.log(isd)
    total = K.lattice_log_sum(d, alpha, hn, user, log_k, quad.x_switch,
                              quad.max_lattice_radius)[0]
    return -float(total)


# ---------------------------------------------------------------- coverage


def _log_noise(scenario: Scenario, T: float, r):
    """log E[exp(-mu T sigma2 / l(r))] = -mu T sigma2 (h^2 + r^2)^(alpha/2)."""
    if scenario.noise == 0.0:
        return np.zeros_like(np.asarray(r, dtype=float))
    h = _effective_h(scenario.model)
    r = np.asarray(r, dtype=float)
    return -scenario.mu * T * scenario.noise * (h * h + r * r) ** (0.5 * scenario.model.alpha)


def _log_pc_ppp(scenario: Scenario, T: float, quad: QuadratureControl) -> float:
    dep, model = scenario.deployment, scenario.model
    d, lam, alpha = dep.dimension, dep.density, model.alpha
    h = _effective_h(model)
    rho_d = rho(T, alpha, d)
    if d == 2 or h == 0.0:
        # r -> q = c_d lam r^d turns the serving density into exp(-q) dq and the
        # interference exponent into q rho_d (plus c_d lam h^2 rho_2 in 2D)
        c_d = 2.0 if d == 1 else math.pi
        log_pre = -math.pi * lam * h * h * rho_d if d == 2 else 0.0
        if scenario.noise == 0.0:
            return log_pre - math.log1p(rho_d)

        def log_f(q):
            r = (q / (c_d * lam)) ** (1.0 / d)
            return -q * (1.0 + rho_d) + _log_noise(scenario, T, r)

        return log_pre + K.log_integral_decay(log_f, 1.0 / (1.0 + rho_d))
    # 1D with antenna height: k = lam r, the interference integral is numeric
    c = lam * h

    def log_f(k):
        k = np.asarray(k, dtype=float)
        log_k = math.log(T) - K.log_gain(k, alpha, c)
        xi = K.radial_integral("frac", 1, alpha, c, log_k, k, quad.x_switch,
                               max_radius=quad.max_lattice_radius)
        return math.log(2.0) - 2.0 * k - 2.0 * xi + _log_noise(scenario, T, k / lam)

    return K.log_integral_decay(log_f, 0.5 / (1.0 + rho(T, alpha, 1)))


def _lattice_rule_line(T: float, alpha: float):
    a, w = K.graded_rule(T ** (-1.0 / alpha), 12)
    return 0.5 * a, 0.5 * w


def _log_pc_line(scenario: Scenario, T: float, quad: QuadratureControl) -> float:
    isd = scenario.deployment.isd
    alpha = scenario.model.alpha
    h = _effective_h(scenario.model)
    hn = h / isd
    a, w = _lattice_rule_line(T, alpha)
    log_k = math.log(T) - K.log_gain(a, alpha, hn)
    s = K.lattice_log_sum(1, alpha, hn, a[:, None], log_k, quad.x_switch,
                          quad.max_lattice_radius)
    # the serving distance is uniform on [0, isd/2]: density 2 in units of isd
    vals = -s + _log_noise(scenario, T, a * isd)
    return float(special.logsumexp(vals, b=2.0 * w))


def _hex_rule(T: float, alpha: float):
    """Nodes over the half wedge phi in [0, pi/6] of the hexagonal cell.

    Returns user positions (units of isd) and the weights of the joint
    (r, theta) density, both halves of the wedge included.
    """
    v, wv = K.graded_rule(T ** (-1.0 / alpha), 8)
    xg, wg = K.gauss_legendre(10)
    phi = (math.pi / 12.0) * (xg + 1.0)
    wphi = (math.pi / 12.0) * wg
    R = 0.5 / np.cos(phi)
    rad = R[:, None] * v[None, :]
    users = np.stack([rad * np.cos(phi)[:, None], rad * np.sin(phi)[:, None]], axis=-1)
    weight = (24.0 / SQRT3) * (R * R * wphi)[:, None] * (v * wv)[None, :]
    return users.reshape(-1, 2), rad.ravel(), weight.ravel()


def _log_pc_hex(scenario: Scenario, T: float, quad: QuadratureControl) -> float:
    isd = scenario.deployment.isd
    alpha = scenario.model.alpha
    h = _effective_h(scenario.model)
    hn = h / isd
    users, rad, weight = _hex_rule(T, alpha)
    log_k = math.log(T) - K.log_gain(rad, alpha, hn)
    s = K.lattice_log_sum(2, alpha, hn, users, log_k, quad.x_switch,
                          quad.max_lattice_radius)
    vals = -s + _log_noise(scenario, T, rad * isd)
    return float(special.logsumexp(vals, b=weight))


def log_coverage_probability(scenario: Scenario, T: float,
                             quad: QuadratureControl = DEFAULT_QUAD) -> float:
    """Natural log of :func:`coverage_probability` (accurate when pc underflows)."""
    T = _check_threshold(T)
    dep = scenario.deployment
    scenario.model.check_dimension(dep.dimension)
    _effective_h(scenario.model)
    if dep.kind is DeploymentKind.PPP:
        out = _log_pc_ppp(scenario, T, quad)
    elif dep.kind is DeploymentKind.LINE:
        out = _log_pc_line(scenario, T, quad)
    else:
        out = _log_pc_hex(scenario, T, quad)
    return float(min(out, 0.0))


def coverage_probability(scenario: Scenario, T: float,
                         quad: QuadratureControl = DEFAULT_QUAD) -> float:
    """P(SINR > T) for the typical user by numerical integration over r."""
    return math.exp(log_coverage_probability(scenario, T, quad))


# ---------------------------------------------------------------- closed forms


def _log_ratio_cosh(beta, gamma, x):
    """log[(cosh beta - cos x) / (cosh gamma - cos x)], stable for all arguments.

    Uses cosh y - cos x = 2 (sinh(y/2)^2 + sin(x/2)^2); below x = 1e-6 the
    sine is replaced by its series x/2.
    """
    x = np.asarray(x, dtype=float)
    s2 = np.where(x < 1e-6, 0.25 * x * x, np.sin(0.5 * x) ** 2)

    def log_term(y):
        half = 0.5 * np.asarray(y, dtype=float)
        big = half > 20.0
        small_arg = np.minimum(half, 20.0)
        big_arg = np.maximum(half, 20.0)
        # log sinh z = z + log(1 - e^-2z) - log 2 for large z
        ls = big_arg + np.log1p(-np.exp(-2.0 * big_arg)) - math.log(2.0)
        with np.errstate(divide="ignore"):
            small = np.log(np.sinh(small_arg) ** 2 + s2)
        large = 2.0 * ls + np.log1p(s2 * np.exp(-2.0 * ls))
        return np.where(big, large, small)

    with np.errstate(invalid="ignore"):
        return log_term(beta) - log_term(gamma)


def _line_closed_log_integrand(T: float, bprime: float, x):
    """log of (1+T) (cosh b' - cos x)/(cosh sqrt(b'^2 + T(x^2 + b'^2)) - cos x)."""
    x = np.asarray(x, dtype=float)
    gamma = np.sqrt(bprime * bprime + T * (x * x + bprime * bprime))
    out = math.log1p(T) + _log_ratio_cosh(bprime, gamma, x)
    if bprime == 0.0:
        # removable 0/0 at x = 0, where the ratio tends to 1/(1+T)
        out = np.where(x == 0.0, 0.0, out)
    return out


def _log_pc_line_closed(scenario: Scenario, T: float) -> float:
    lam = scenario.density
    alpha = scenario.model.alpha
    h = _effective_h(scenario.model)
    bprime = 2.0 * math.pi * lam * h
    u, w = K.graded_rule(T ** -0.5, 12)
    x = math.pi * u
    r = x / (2.0 * math.pi * lam)
    vals = _line_closed_log_integrand(T, bprime, x) + _log_noise(scenario, T, r)
    # x = 2 pi r / isd is uniform on [0, pi]
    return float(special.logsumexp(vals, b=w))


def _log_pc_ppp1d_alpha2(scenario: Scenario, T: float) -> float:
    c = scenario.density * _effective_h(scenario.model)

    def log_f(k):
        k = np.asarray(k, dtype=float)
        B = T * (c * c + k * k)
        A = np.sqrt(c * c + B)
        return math.log(2.0) - 2.0 * k - 2.0 * B * np.arctan2(A, k) / A

    return K.log_integral_decay(log_f, 0.5 / (1.0 + rho(T, 2.0, 1)))


def closed_form_available(scenario: Scenario) -> bool:
    dep, model = scenario.deployment, scenario.model
    if model.kind is PathLossKind.L2:
        return False
    if dep.kind is DeploymentKind.PPP:
        if scenario.noise != 0.0:
            return False
        return dep.dimension == 2 or model.h == 0.0 or model.kind is PathLossKind.L0 \
            or model.alpha == 2.0
    if dep.kind is DeploymentKind.LINE:
        return model.alpha == 2.0
    return False


def log_coverage_closed_form(scenario: Scenario, T: float) -> float:
    T = _check_threshold(T)
    if not closed_form_available(scenario):
        raise UnsupportedCaseError(f"no closed form for {scenario}")
    dep, model = scenario.deployment, scenario.model
    d = dep.dimension
    model.check_dimension(d)
    h = _effective_h(model)
    if dep.kind is DeploymentKind.LINE:
        return min(_log_pc_line_closed(scenario, T), 0.0)
    rho_d = rho(T, model.alpha, d)
    if d == 2 or h == 0.0:
        log_pre = -math.pi * dep.density * h * h * rho_d if d == 2 else 0.0
        return log_pre - math.log1p(rho_d)
    return min(_log_pc_ppp1d_alpha2(scenario, T), 0.0)


def coverage_closed_form(scenario: Scenario, T: float) -> float:
    """Coverage from the closed-form expressions.

    Supported: noise-less PPP in 2D (any alpha, l0 or l1); noise-less PPP in
    1D for l0 (any alpha) and l1 with alpha = 2; LINE with alpha = 2 under l0
    or l1, with noise.
    """
    return math.exp(log_coverage_closed_form(scenario, T))


def countering_height(density: float, c: float, d: int) -> float:
    """Antenna height keeping density * h^d = c."""
    if not density > 0:
        raise DomainError("density must be positive")
    if not c > 0:
        raise DomainError("c must be positive")
    if d not in (1, 2):
        raise DomainError("d must be 1 or 2")
    return (c / density) ** (1.0 / d)
