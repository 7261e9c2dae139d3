"""Special-function kernels: Hurwitz zeta, lattice sums and their asymptotics.

All functions are pure and operate on Python floats.  The infinite sums are
evaluated by Euler-Maclaurin summation or by closed forms in terms of
hyperbolic functions, never by brute-force summation (which only appears in
the test-suite as an oracle).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import special

from .errors import ConvergenceError, DomainError

DEFAULT_REL_TOL = 1e-12
DEFAULT_MAX_TERMS = 10**7

# number of leading terms summed directly before switching to Euler-Maclaurin
_EM_DIRECT_TERMS = 64
# |z| at which the asymptotic series of the trigamma function is used
_TRIGAMMA_SHIFT = 24.0
# c below which the power series in c^2 replaces the coth closed forms
_SMALL_C = 0.5


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for infinite sums."""

    rel_tol: float = DEFAULT_REL_TOL
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple:
    """B_2, B_4, ..., B_{2*count}."""
    b = special.bernoulli(2 * count)
    return tuple(float(b[2 * j]) for j in range(1, count + 1))


def hurwitz_zeta(s: float, a: float, ctrl: SeriesControl | None = None,
                 order: int = 30) -> float:
    """Hurwitz zeta function sum_{i>=0} (i + a)^(-s) for s > 1, a > 0.

    Uses Euler-Maclaurin summation with up to ``order`` Bernoulli correction
    terms.  The number of directly summed terms grows until the correction
    series reaches ``ctrl.rel_tol``; ``ConvergenceError`` is raised when that
    would need more than ``ctrl.max_terms`` terms.
    """
    ctrl = ctrl or SeriesControl()
    s = float(s)
    a = float(a)
    if not s > 1.0:
        raise DomainError(f"hurwitz_zeta needs s > 1, got s={s}")
    if not a > 0.0:
        raise DomainError(f"hurwitz_zeta needs a > 0, got a={a}")
    bern = _bernoulli_even(order)

    n_direct = max(0, math.ceil(8.0 + 0.5 * s - a))
    while True:
        if n_direct > ctrl.max_terms:
            raise ConvergenceError(
                f"hurwitz_zeta({s}, {a}) did not converge within "
                f"{ctrl.max_terms} terms")
        head = math.fsum((a + k) ** (-s) for k in range(n_direct))
        x = a + n_direct
        tail = x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** (-s)
        # term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * x^(-s-2j+1)
        rising = s
        fact = 2.0
        xpow = x ** (-s - 1.0)
        converged = False
        for j in range(1, order + 1):
            term = bern[j - 1] / fact * rising * xpow
            tail += term
            total = head + tail
            if abs(term) <= ctrl.rel_tol * abs(total) * 0.1:
                converged = True
                break
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            fact *= (2 * j + 1) * (2 * j + 2)
            xpow /= x * x
        if converged:
            return head + tail
        n_direct = max(2 * n_direct, 16)


def _zeta_power_series(c: float, p: int) -> float:
    """sum_{k>=1} (k^2 + c^2)^(-p) as a power series in c^2 (valid for c < 1)."""
    c2 = c * c
    total = 0.0
    coef = 1.0  # binom(-p, m)
    c2m = 1.0
    for m in range(200):
        term = coef * c2m * float(special.zeta(2 * p + 2 * m))
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total
        coef *= -(p + m) / (m + 1)
        c2m *= c2
    raise ConvergenceError(f"power series for c={c} did not converge")


def _inv_sinh2(z: float) -> float:
    """1 / sinh(z)^2 without overflow."""
    if z > 350.0:
        e = math.exp(-2.0 * z)
        return 4.0 * e / (1.0 - e) ** 2
    return 1.0 / math.sinh(z) ** 2


def sum_inv_quadratic(c: float) -> float:
    """sum_{i>=1} 1 / (i^2 + c^2) = -1/(2c^2) + pi coth(pi c) / (2c)."""
    c = float(c)
    if not c > 0.0:
        raise DomainError(f"sum_inv_quadratic needs c > 0, got {c}")
    if c < _SMALL_C:
        # the closed form cancels catastrophically as c -> 0
        return _zeta_power_series(c, 1)
    return -0.5 / (c * c) + math.pi / (2.0 * c * math.tanh(math.pi * c))


def sum_inv_power(c: float, p: float) -> float:
    """sum_{k>=1} (k^2 + c^2)^(-p), p > 1/2.

    Closed forms (obtained by differentiating the coth identity with respect
    to c^2) are used for p in {1, 2, 3}; any other p falls back to
    Euler-Maclaurin summation.
    """
    c = float(c)
    if not c > 0.0:
        raise DomainError(f"sum_inv_power needs c > 0, got {c}")
    if not p > 0.5:
        raise DomainError(f"sum_inv_power diverges for p={p} <= 1/2")
    if p == 1:
        return sum_inv_quadratic(c)
    if p in (2, 3):
        if c < _SMALL_C:
            return _zeta_power_series(c, int(p))
        pc = math.pi * c
        coth = 1.0 / math.tanh(pc)
        isinh2 = _inv_sinh2(pc)
        if p == 2:
            return (math.pi ** 2 * isinh2 / (4.0 * c ** 2)
                    - 0.5 / c ** 4
                    + math.pi * coth / (4.0 * c ** 3))
        return (math.pi ** 3 * coth * isinh2 / (8.0 * c ** 3)
                + 3.0 * math.pi * coth / (16.0 * c ** 5)
                + 3.0 * math.pi ** 2 * isinh2 / (16.0 * c ** 4)
                - 0.5 / c ** 6)
    return _em_sum_inv_power(c, float(p), 1)


def _em_sum_inv_power(c: float, p: float, start: int) -> float:
    """Euler-Maclaurin sum_{k>=start} (k^2 + c^2)^(-p)."""
    K = max(start, _EM_DIRECT_TERMS)
    head = math.fsum((k * k + c * c) ** (-p) for k in range(start, K))
    q = K * K + c * c
    f = q ** (-p)
    d1 = -2.0 * p * K * q ** (-p - 1)
    d3 = (12.0 * p * (p + 1) * K * q ** (-p - 2)
          - 8.0 * p * (p + 1) * (p + 2) * K ** 3 * q ** (-p - 3))
    return head + _int_inv_power(K, c, p) + 0.5 * f - d1 / 12.0 + d3 / 720.0


def _int_inv_power(K: float, c: float, p: float) -> float:
    """integral_K^inf (k^2 + c^2)^(-p) dk."""
    if c == 0.0 or c < 1e-8 * K:
        return K ** (1.0 - 2.0 * p) / (2.0 * p - 1.0)
    a = p - 0.5
    x = c * c / (K * K + c * c)
    log_val = ((1.0 - 2.0 * p) * math.log(c) + math.log(special.betainc(a, 0.5, x))
               + special.betaln(a, 0.5))
    return 0.5 * math.exp(log_val)


def sum_ring_power(n: int, c: float, p: float) -> float:
    """sum_{k>=n+1} k (k^2 + c^2)^(-p), p > 1 (ring sums of a hexagonal lattice)."""
    if not p > 1.0:
        raise DomainError(f"sum_ring_power diverges for p={p} <= 1")
    if p == 2:
        return tail_sum_quartic(n, c)
    n = _check_index(n)
    c = float(c)
    if c < 0.0:
        raise DomainError(f"sum_ring_power needs c >= 0, got {c}")
    start = n + 1
    K = max(start, _EM_DIRECT_TERMS)
    head = math.fsum(k * (k * k + c * c) ** (-p) for k in range(start, K))
    q = K * K + c * c
    g = K * q ** (-p)
    d1 = q ** (-p) - 2.0 * p * K * K * q ** (-p - 1)
    d3 = (-6.0 * p * q ** (-p - 1) + 24.0 * p * (p + 1) * K * K * q ** (-p - 2)
          - 8.0 * p * (p + 1) * (p + 2) * K ** 4 * q ** (-p - 3))
    integral = q ** (1.0 - p) / (2.0 * (p - 1.0))
    return head + integral + 0.5 * g - d1 / 12.0 + d3 / 720.0


def _check_index(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"index must be a non-negative integer, got {n!r}")
    return int(n)


def tail_sum_quartic(n: int, c: float) -> float:
    """sum_{k>=n+1} k / (k^2 + c^2)^2 through the trigamma function.

    The sum equals (j/4c) (psi1(n+1+jc) - psi1(n+1-jc)) = -Im psi1(n+1+jc) / (2c).
    Only that conjugate combination is needed, so it is evaluated with real
    arithmetic: the recurrence psi1(z) = psi1(z+1) + z^-2 moves the argument
    out to |z| >= 24, where the asymptotic series

        psi1(z) ~ 1/z + 1/(2 z^2) + sum_j B_2j / z^(2j+1)

    is summed term by term using Im z^-m = -|z|^-m sin(m arg z).
    """
    n = _check_index(n)
    c = float(c)
    if not c > 0.0:
        raise DomainError(f"tail_sum_quartic needs c > 0, got {c}")
    start = n + 1
    M = max(start, math.ceil(_TRIGAMMA_SHIFT))
    head = math.fsum(k / (k * k + c * c) ** 2 for k in range(start, M))
    modulus = math.hypot(M, c)
    phase = math.atan2(c, M)
    # coefficients a_m of z^-m in the trigamma asymptotic series
    coeffs = [(1, 1.0), (2, 0.5)]
    coeffs += [(2 * j + 1, b) for j, b in enumerate(_bernoulli_even(12), start=1)]
    tail = 0.0
    for m, a_m in coeffs:
        tail += a_m * modulus ** (-m) * math.sin(m * phase)
    return head + tail / (2.0 * c)


def zeta_tail_asymptotic(alpha: float, t: float) -> float:
    """Two-term large-t expansion of zeta(alpha, 1 + t).

    Gamma(alpha-1)/Gamma(alpha) (1+t)^(1-alpha) + (1+t)^(-alpha) / 2; the
    error is O(t^(-alpha-1)).  Meant for limits and cross-checks only.
    """
    alpha = float(alpha)
    t = float(t)
    if not alpha > 1.0:
        raise DomainError(f"zeta_tail_asymptotic needs alpha > 1, got {alpha}")
    if not t > 0.0:
        raise DomainError(f"zeta_tail_asymptotic needs t > 0, got {t}")
    ratio = math.exp(special.gammaln(alpha - 1.0) - special.gammaln(alpha))
    return ratio * (1.0 + t) ** (1.0 - alpha) + 0.5 * (1.0 + t) ** (-alpha)
