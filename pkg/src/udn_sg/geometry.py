"""Base-station deployments, nearest-BS distance laws and hex interference bounds.

Lattices are expressed through their inter-site distance (ISD):

* LINE (1D): points i * isd, density 1/isd.
* HEX (2D): points (m + n/2, n sqrt(3)/2) * isd, density 2 / (isd^2 sqrt(3)).

The typical user sits at the origin.  Lattice samples receive a uniform random
offset (and, for HEX, a uniform random rotation) so the user sees a
stationary deployment.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import specfun
from .errors import DivergenceError, DomainError
from .pathloss import PathLossKind, PathLossModel

SQRT3 = math.sqrt(3.0)


class DeploymentKind(str, enum.Enum):
    PPP = "ppp"
    LINE = "line"
    HEX = "hex"


def isd_from_density(density: float, d: int) -> float:
    """Inter-site distance of the lattice with the given density."""
    if not density > 0:
        raise DomainError(f"density must be positive, got {density}")
    if d == 1:
        return 1.0 / density
    if d == 2:
        return math.sqrt(2.0 / (density * SQRT3))
    raise DomainError(f"dimension must be 1 or 2, got {d}")


def density_from_isd(isd: float, d: int) -> float:
    """Inverse of :func:`isd_from_density`."""
    if not isd > 0:
        raise DomainError(f"isd must be positive, got {isd}")
    if d == 1:
        return 1.0 / isd
    if d == 2:
        return 2.0 / (isd * isd * SQRT3)
    raise DomainError(f"dimension must be 1 or 2, got {d}")


@dataclass(frozen=True)
class Deployment:
    kind: DeploymentKind
    dimension: int
    density: float

    def __post_init__(self):
        object.__setattr__(self, "kind", DeploymentKind(self.kind))
        if self.dimension not in (1, 2):
            raise DomainError(f"dimension must be 1 or 2, got {self.dimension}")
        if not self.density > 0:
            raise DomainError(f"density must be positive, got {self.density}")
        if self.kind is DeploymentKind.LINE and self.dimension != 1:
            raise DomainError("LINE deployments are one-dimensional")
        if self.kind is DeploymentKind.HEX and self.dimension != 2:
            raise DomainError("HEX deployments are two-dimensional")

    @property
    def regular(self) -> bool:
        return self.kind is not DeploymentKind.PPP

    @property
    def isd(self) -> float:
        return isd_from_density(self.density, self.dimension)

    @classmethod
    def regular_for(cls, d: int, density: float) -> "Deployment":
        return cls(DeploymentKind.LINE if d == 1 else DeploymentKind.HEX, d, density)

    def with_density(self, density: float) -> "Deployment":
        return Deployment(self.kind, self.dimension, density)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "dimension": self.dimension,
                "density": self.density}

    @classmethod
    def from_dict(cls, data: dict) -> "Deployment":
        return cls(DeploymentKind(str(data["kind"]).lower()), int(data["dimension"]),
                   float(data["density"]))


@dataclass
class PointSet:
    """A realized deployment: shape (n,) in 1D, (n, 2) in 2D."""

    points: np.ndarray
    window_radius: float
    origin_excluded_index: Optional[int] = None

    @property
    def dimension(self) -> int:
        return 1 if self.points.ndim == 1 else 2

    def distances(self) -> np.ndarray:
        """Distances of all points from the origin."""
        if self.dimension == 1:
            return np.abs(self.points)
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if self.dimension == 1:
                writer.writerow(["x"])
                writer.writerows([repr(float(x))] for x in self.points)
            else:
                writer.writerow(["x", "y"])
                writer.writerows([repr(float(x)), repr(float(y))] for x, y in self.points)


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator; ``seed`` may be an int, a sequence or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def hex_lattice(isd: float, radius: float, offset=(0.0, 0.0), rotation: float = 0.0) -> np.ndarray:
    """Points of the rotated, shifted hexagonal lattice inside a disk of given radius.

    The lattice (m + n/2, n sqrt(3)/2) * isd is first shifted by ``offset``
    (in lattice units of length) and then rotated about the origin.
    """
    ox, oy = offset
    n_max = int(math.ceil((radius / isd) * 2.0 / SQRT3)) + 2
    n = np.arange(-n_max, n_max + 1)
    m_max = int(math.ceil(radius / isd)) + n_max + 2
    m = np.arange(-m_max, m_max + 1)
    mm, nn = np.meshgrid(m, n, indexing="ij")
    x = (mm + 0.5 * nn).ravel() * isd + ox
    y = (nn * (SQRT3 / 2.0)).ravel() * isd + oy
    keep = x * x + y * y <= radius * radius
    x, y = x[keep], y[keep]
    if rotation:
        c, s = math.cos(rotation), math.sin(rotation)
        x, y = c * x - s * y, s * x + c * y
    return np.column_stack([x, y])


def sample_deployment(dep: Deployment, window_radius: float, seed) -> PointSet:
    """Draw one deployment inside a ball of radius ``window_radius`` about the origin."""
    if not window_radius > 0:
        raise DomainError(f"window_radius must be positive, got {window_radius}")
    rng = make_rng(seed)
    R = float(window_radius)
    if dep.kind is DeploymentKind.PPP:
        if dep.dimension == 1:
            n = rng.poisson(dep.density * 2.0 * R)
            pts = rng.uniform(-R, R, size=n)
        else:
            n = rng.poisson(dep.density * math.pi * R * R)
            rad = R * np.sqrt(rng.random(n))
            ang = 2.0 * math.pi * rng.random(n)
            pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        return PointSet(pts, R)
    isd = dep.isd
    if dep.kind is DeploymentKind.LINE:
        u = rng.random()
        i = np.arange(-math.ceil(R / isd) - 1, math.ceil(R / isd) + 2)
        pts = (i + u) * isd
        return PointSet(pts[np.abs(pts) <= R], R)
    # uniform offset over the fundamental parallelogram, then random rotation
    a, b = rng.random(2)
    offset = ((a + 0.5 * b) * isd, b * (SQRT3 / 2.0) * isd)
    rotation = 2.0 * math.pi * rng.random()
    return PointSet(hex_lattice(isd, R, offset, rotation), R)


def hex_cell_radius(theta):
    """Distance, in units of the ISD, from a HEX site to its cell boundary.

    ``theta`` in [0, pi/3] is measured from a cell vertex, so the boundary
    lies at 1 / (2 sin(theta + pi/3)); the direction in the lattice frame is
    theta - pi/6.
    """
    return 0.5 / np.sin(np.asarray(theta, dtype=float) + math.pi / 3.0)


def nearest_distance_pdf(dep: Deployment, r, theta=None):
    """Density of the distance from the typical user to its nearest BS.

    For HEX with ``theta`` given, returns the joint density of (r, theta) in
    dr dtheta (uniform over the 1/6 cell wedge, Jacobian included); without
    ``theta`` it returns the marginal density of r.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be >= 0")
    lam = dep.density
    if dep.kind is DeploymentKind.PPP:
        if dep.dimension == 1:
            out = 2.0 * lam * np.exp(-2.0 * lam * r)
        else:
            out = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r * r)
    elif dep.kind is DeploymentKind.LINE:
        isd = dep.isd
        out = np.where(r <= 0.5 * isd, 2.0 / isd, 0.0)
    else:
        isd = dep.isd
        coef = 12.0 / (isd * isd * SQRT3)
        if theta is not None:
            theta = np.asarray(theta, dtype=float)
            if np.any(theta < 0) or np.any(theta > math.pi / 3.0):
                raise DomainError("theta must lie in [0, pi/3]")
            out = np.where(r <= isd * hex_cell_radius(theta), coef * r, 0.0)
        else:
            a = 0.5 * isd
            with np.errstate(invalid="ignore", divide="ignore"):
                # fraction of the pi/3 wedge of angles still inside the cell
                frac = np.where(r <= a, math.pi / 3.0,
                                2.0 * (np.arcsin(np.minimum(a / np.maximum(r, a), 1.0))
                                       - math.pi / 3.0))
            out = np.where(r <= isd / SQRT3, coef * r * frac, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def nearest_distance_cdf(dep: Deployment, r):
    """P(nearest BS distance <= r)."""
    r = np.asarray(r, dtype=float)
    lam = dep.density
    if dep.kind is DeploymentKind.PPP:
        if dep.dimension == 1:
            out = -np.expm1(-2.0 * lam * r)
        else:
            out = -np.expm1(-math.pi * lam * r * r)
    elif dep.kind is DeploymentKind.LINE:
        out = np.clip(2.0 * r / dep.isd, 0.0, 1.0)
    else:
        a = 0.5 * dep.isd
        rr = np.minimum(r, dep.isd / SQRT3)
        with np.errstate(invalid="ignore"):
            ratio = np.minimum(a / np.maximum(rr, a), 1.0)
            segment = rr * rr * np.arccos(ratio) - a * np.sqrt(np.maximum(rr * rr - a * a, 0.0))
        area = math.pi * rr * rr - 6.0 * segment
        out = np.clip(lam * area, 0.0, 1.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _ring_sum(model: PathLossModel, scale: float, start: int) -> float:
    """sum_{k>=start} k * l(scale * k) for a ring count proportional to k."""
    a = model.alpha
    if model.kind is PathLossKind.L0 or model.h == 0.0:
        return scale ** -a * specfun.hurwitz_zeta(a - 1.0, float(start))
    if model.kind is PathLossKind.L1:
        c = model.h / scale
        return scale ** -a * specfun.sum_ring_power(start - 1, c, a / 2.0)
    # l2: flat for k <= h / scale, pure power beyond
    n = max(int(math.floor(model.h / scale)), start - 1)
    flat = 0.5 * (n * (n + 1) - (start - 1) * start) * model.h ** -a
    return flat + scale ** -a * specfun.hurwitz_zeta(a - 1.0, float(n + 1))


def interference_bounds_hex(model: PathLossModel, isd: float) -> tuple[float, float]:
    """Ring-sum bounds on the interference at a HEX site from all other sites.

    lower = sum_{k>=1} 6k l(isd k)
    upper = 6 l(isd) + sum_{k>=2} 6k l(isd k sqrt(3)/2)

    The k-th hexagonal ring holds 6k sites whose distances lie between
    isd k sqrt(3)/2 and isd k.
    """
    if not isd > 0:
        raise DomainError(f"isd must be positive, got {isd}")
    if not model.alpha > 2.0:
        raise DivergenceError(f"hex ring sums diverge for alpha={model.alpha} <= 2")
    lower = 6.0 * _ring_sum(model, isd, 1)
    upper = 6.0 * model(isd) + 6.0 * _ring_sum(model, isd * SQRT3 / 2.0, 2)
    return lower, upper
