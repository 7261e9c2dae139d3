"""Quadrature rules and interference kernels used by the analytic module.

Everything here works in normalized length units (lattice ISD = 1, or PPP
density = 1) with the normalized gain g(rho) = (h^2 + rho^2)^(-alpha/2);
h = 0 gives the unbounded power law.

Two functionals of the interference field are needed:

* radial integrals  int_lo^inf rho^(d-1) phi(K g(rho)) drho  with
  phi(x) = x/(1+x) (Poisson Laplace functional) or log(1+x) (lattice
  continuum correction);
* lattice sums  sum_{p != 0} log(1 + K g(|p - u|)),  i.e. minus the log of
  the Laplace transform of the interference seen by a user at u.

The lattice sum converges slowly (like a power law), so it is split with a
smooth radial window w: points inside the window are summed exactly and the
remainder (1 - w) * log(1 + x) is replaced by its continuum integral.  Since
(1 - w) log(1 + x) is smooth on the lattice scale, the Poisson summation
error of that replacement is of order exp(-(pi sigma)^2), below 1e-13 for the
window used here.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import TruncationError
from .specfun import _int_inv_power

SQRT3 = math.sqrt(3.0)

# smooth window: w(rho) = erfc((rho - WINDOW_CENTER) / WINDOW_WIDTH) / 2
WINDOW_CENTER = 12.0
WINDOW_WIDTH = 1.75
WINDOW_INNER = WINDOW_CENTER - 6.0 * WINDOW_WIDTH   # 1 - w < 1e-17 below
WINDOW_OUTER = WINDOW_CENTER + 6.0 * WINDOW_WIDTH   # w < 1e-17 beyond

RADIAL_NODES = 24
SERIES_TERMS = 4
MAX_PANELS = 400

# coefficients of phi(x) = sum_m c_m x^m for small x
_SERIES = {
    "frac": (1.0, -1.0, 1.0, -1.0),
    "log": (1.0, -0.5, 1.0 / 3.0, -0.25),
}


@lru_cache(maxsize=None)
def gauss_legendre(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panel_rule(bounds, q: int):
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    x, w = gauss_legendre(q)
    b = np.asarray(bounds, dtype=float)
    lo, hi = b[:-1, None], b[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def graded_rule(scale: float, q: int, min_levels: int = 4, ratio: float = 4.0):
    """Gauss-Legendre rule on [0, 1] with panels graded geometrically toward 0.

    Panels [ratio^-(j+1), ratio^-j] are added until the innermost boundary
    drops below scale/100, so integrands concentrated in [0, scale] are
    still resolved.
    """
    levels = min_levels
    if scale < 1.0:
        levels = max(levels, int(math.ceil(math.log(100.0 / scale) / math.log(ratio))))
    levels = min(levels, 60)
    bounds = [0.0] + [ratio ** -(levels - j) for j in range(levels)] + [1.0]
    return panel_rule(bounds, q)


def phi(kind: str, x):
    if kind == "log":
        return np.log1p(x)
    return x / (1.0 + x)


def log_gain(rho, alpha: float, h: float):
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        return -0.5 * alpha * np.log(h * h + rho * rho)


def log_moment(m: int, d: int, alpha: float, h: float, R: float) -> float:
    """log of int_R^inf rho^(d-1) g(rho)^m drho."""
    p = 0.5 * m * alpha  # g^m = (h^2 + rho^2)^-p
    if h == 0.0:
        return (d - 2.0 * p) * math.log(R) - math.log(2.0 * p - d)
    if d == 2:
        return (1.0 - p) * math.log(R * R + h * h) - math.log(2.0 * p - 2.0)
    t = h / R
    if t < 1e-3:
        # expansion in (h/R)^2, error O((h/R)^6)
        t2 = t * t
        val = (1.0 / (2 * p - 1) - p * t2 / (2 * p + 1)
               + 0.5 * p * (p + 1) * t2 * t2 / (2 * p + 3))
        return (1.0 - 2.0 * p) * math.log(R) + math.log(val)
    a = p - 0.5
    x = h * h / (R * R + h * h)
    return (math.log(0.5) + (1.0 - 2.0 * p) * math.log(h)
            + math.log(special.betainc(a, 0.5, x)) + special.betaln(a, 0.5))


def series_tail(kind: str, d: int, alpha: float, h: float, log_k, R):
    """int_R^inf rho^(d-1) phi(K g) drho by the small-x series, per node."""
    log_k = np.atleast_1d(np.asarray(log_k, dtype=float))
    R = np.broadcast_to(np.asarray(R, dtype=float), log_k.shape)
    out = np.zeros_like(log_k)
    coeffs = _SERIES[kind]
    for idx in range(log_k.size):
        total = 0.0
        for m, c in enumerate(coeffs[:SERIES_TERMS], start=1):
            total += c * math.exp(m * log_k[idx] + log_moment(m, d, alpha, h, float(R[idx])))
        out[idx] = total
    return out


def radial_integral(kind: str, d: int, alpha: float, h: float, log_k, lo,
                    x_switch: float, windowed: bool = False,
                    max_radius: float = 1e15):
    """Vectorized int_lo^inf rho^(d-1) wt(rho) phi(K g(rho)) drho.

    ``log_k`` and ``lo`` broadcast to one value per node.  The range is cut
    into doubling panels [lo 2^j, lo 2^(j+1)] integrated by Gauss-Legendre
    until K g(rho) <= x_switch, after which the small-x series with closed-form
    moments finishes the integral.  With ``windowed`` the weight is the
    continuum complement 1 - w of the lattice window (and the series switch
    waits until the window is saturated).
    """
    log_k = np.atleast_1d(np.asarray(log_k, dtype=float))
    lo = np.broadcast_to(np.asarray(lo, dtype=float), log_k.shape).copy()
    if np.any(lo <= 0):
        raise ValueError("radial_integral needs lo > 0")
    log_x_switch = math.log(x_switch)
    min_switch = WINDOW_OUTER if windowed else 0.0
    xg, wg = gauss_legendre(RADIAL_NODES)
    total = np.zeros_like(log_k)
    active = np.ones(log_k.shape, dtype=bool)
    start = lo.copy()
    for _ in range(MAX_PANELS):
        if not active.any():
            return total
        done = active & (log_k + log_gain(start, alpha, h) <= log_x_switch) & (start >= min_switch)
        if done.any():
            total[done] += series_tail(kind, d, alpha, h, log_k[done], start[done])
            active &= ~done
            if not active.any():
                return total
        if np.any(start[active] > max_radius):
            raise TruncationError(
                f"interference integral not converged within radius {max_radius:g}")
        idx = np.nonzero(active)[0]
        a = start[idx, None]
        rho = a * (1.5 + 0.5 * xg)  # panel [a, 2a]
        x = np.exp(log_k[idx, None] + log_gain(rho, alpha, h))
        f = phi(kind, x)
        if d == 2:
            f = f * rho
        if windowed:
            f = f * (0.5 * special.erfc((WINDOW_CENTER - rho) / WINDOW_WIDTH))
        total[idx] += (0.5 * a[:, 0]) * (f @ wg)
        start[idx] *= 2.0
    raise TruncationError("interference integral exceeded the panel budget")


@lru_cache(maxsize=None)
def lattice_points(d: int) -> np.ndarray:
    """Lattice sites (ISD 1) with |p| <= WINDOW_OUTER + 1, origin excluded."""
    reach = WINDOW_OUTER + 1.0
    if d == 1:
        n = int(math.ceil(reach))
        i = np.arange(-n, n + 1, dtype=float)
        pts = i[i != 0][:, None]
    else:
        n = int(math.ceil(reach * 2.0 / SQRT3)) + 1
        m = np.arange(-2 * n, 2 * n + 1)
        mm, nn = np.meshgrid(m, np.arange(-n, n + 1), indexing="ij")
        x = (mm + 0.5 * nn).ravel().astype(float)
        y = (nn * (SQRT3 / 2.0)).ravel()
        r2 = x * x + y * y
        keep = (r2 <= reach * reach) & (r2 > 0)
        pts = np.column_stack([x[keep], y[keep]])
    pts.flags.writeable = False
    return pts


def lattice_log_sum(d: int, alpha: float, h: float, users, log_k, x_switch: float,
                    max_radius: float = 1e15):
    """sum_{p != 0} log(1 + K g(|p - u|)) for users u (shape (n, d)).

    The site at the origin is the serving BS and is excluded.
    """
    users = np.asarray(users, dtype=float).reshape(-1, d)
    log_k = np.broadcast_to(np.asarray(log_k, dtype=float), (users.shape[0],))
    pts = lattice_points(d)
    density = 1.0 if d == 1 else 2.0 / SQRT3
    surface = 2.0 if d == 1 else 2.0 * math.pi
    out = np.empty(users.shape[0])
    # chunk over users to bound memory
    step = max(1, 400_000 // pts.shape[0])
    for s in range(0, users.shape[0], step):
        u = users[s:s + step]
        diff = pts[None, :, :] - u[:, None, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        x = np.exp(log_k[s:s + step, None] + log_gain(dist, alpha, h))
        w = 0.5 * special.erfc((dist - WINDOW_CENTER) / WINDOW_WIDTH)
        out[s:s + step] = np.sum(w * np.log1p(x), axis=1)
    cont = radial_integral("log", d, alpha, h, log_k, WINDOW_INNER, x_switch,
                           windowed=True, max_radius=max_radius)
    return out + density * surface * cont


def log_integral_decay(log_f, scale: float, q: int = 24, drop: float = 60.0,
                       max_panels: int = 200) -> float:
    """log int_0^inf exp(log_f(x)) dx for an integrand decaying on ``scale``.

    Doubling panels [0, s], [s, 2s], ... are added until the integrand on the
    last panel is below exp(-drop) times the largest value seen.
    """
    xg, wg = gauss_legendre(q)
    logs = []
    peak = -np.inf
    lo, hi = 0.0, scale
    for j in range(max_panels):
        half = 0.5 * (hi - lo)
        x = lo + half * (xg + 1.0)
        lf = np.asarray(log_f(x), dtype=float)
        logs.append(lf + np.log(half * wg))
        pmax = float(np.max(lf))
        peak = max(peak, pmax)
        if peak == -np.inf and j >= 8:
            return -math.inf
        if pmax < peak - drop and lo > 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise TruncationError("semi-infinite integral did not decay")
    return float(special.logsumexp(np.concatenate(logs)))
