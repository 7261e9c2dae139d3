import math

import numpy as np
import pytest
from scipy import integrate

from udn_sg.errors import DivergenceError, DomainError
from udn_sg.geometry import (SQRT3, Deployment, DeploymentKind, PointSet, density_from_isd,
                             hex_cell_radius, hex_lattice, interference_bounds_hex,
                             isd_from_density, nearest_distance_cdf, nearest_distance_pdf,
                             sample_deployment)
from udn_sg.pathloss import PathLossModel

PPP1 = Deployment(DeploymentKind.PPP, 1, 0.7)
PPP2 = Deployment(DeploymentKind.PPP, 2, 0.7)
LINE = Deployment(DeploymentKind.LINE, 1, 0.7)
HEX = Deployment(DeploymentKind.HEX, 2, 0.7)


def test_isd_density_roundtrip():
    assert isd_from_density(2.0, 1) == pytest.approx(0.5)
    assert density_from_isd(1.0, 2) == pytest.approx(2.0 / SQRT3)
    for d in (1, 2):
        assert density_from_isd(isd_from_density(3.3, d), d) == pytest.approx(3.3)


def test_deployment_validation():
    with pytest.raises(DomainError):
        Deployment(DeploymentKind.LINE, 2, 1.0)
    with pytest.raises(DomainError):
        Deployment(DeploymentKind.HEX, 1, 1.0)
    with pytest.raises(DomainError):
        Deployment(DeploymentKind.PPP, 3, 1.0)
    with pytest.raises(DomainError):
        Deployment(DeploymentKind.PPP, 1, 0.0)
    assert Deployment.from_dict(HEX.to_dict()) == HEX
    assert Deployment.regular_for(1, 2.0).kind is DeploymentKind.LINE


def test_hex_lattice_density():
    pts = hex_lattice(1.0, 30.0)
    assert len(pts) / (math.pi * 900) == pytest.approx(2 / SQRT3, rel=0.01)
    d = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1)[:50, :])
    np.fill_diagonal(d[:, :50], np.inf)
    assert d.min() == pytest.approx(1.0)


def test_sample_deployment_ppp_counts():
    counts = [len(sample_deployment(PPP2, 10.0, (5, i)).points) for i in range(200)]
    assert np.mean(counts) == pytest.approx(0.7 * math.pi * 100, rel=0.02)


def test_sample_deployment_reproducible(tmp_path):
    a = sample_deployment(HEX, 5.0, 11)
    b = sample_deployment(HEX, 5.0, 11)
    assert np.array_equal(a.points, b.points)
    a.to_csv(tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().count("\n") == len(a.points) + 1


def test_sample_deployment_line_spacing():
    ps = sample_deployment(LINE, 20.0, 3)
    assert np.allclose(np.diff(np.sort(ps.points.ravel())), LINE.isd)


def test_hex_cell_radius():
    assert hex_cell_radius(math.pi / 6) == pytest.approx(0.5)
    assert hex_cell_radius(0.0) == pytest.approx(1 / SQRT3)
    assert hex_cell_radius(math.pi / 3) == pytest.approx(1 / SQRT3)


@pytest.mark.parametrize("dep", [PPP1, PPP2, LINE, HEX])
def test_pdf_normalized_and_matches_cdf(dep):
    upper = 40.0 if dep.kind is DeploymentKind.PPP else dep.isd
    pts = [dep.isd * 0.5] if dep.kind is DeploymentKind.HEX else None
    total, _ = integrate.quad(lambda r: nearest_distance_pdf(dep, r), 0, upper, points=pts, limit=200)
    assert total == pytest.approx(1.0, abs=1e-8)
    for r in (0.1, 0.5, 0.8):
        r = r * dep.isd
        part, _ = integrate.quad(lambda x: nearest_distance_pdf(dep, x), 0, r, points=None, limit=200)
        assert nearest_distance_cdf(dep, r) == pytest.approx(part, abs=1e-8)


def test_hex_joint_density_integrates_to_marginal():
    r = 0.55 * HEX.isd
    val, _ = integrate.quad(lambda t: nearest_distance_pdf(HEX, r, t), 0, math.pi / 3, limit=200)
    assert val == pytest.approx(nearest_distance_pdf(HEX, r), rel=1e-8)


@pytest.mark.parametrize("dep", [PPP2, HEX, LINE])
def test_nearest_distance_empirical(dep):
    # empirical CDF of the nearest BS to the origin over sampled deployments
    d = np.array([sample_deployment(dep, 6.0 * dep.isd, (9, i)).distances().min() for i in range(4000)])
    for q in (0.2, 0.45, 0.55):
        r = q * dep.isd
        assert np.mean(d <= r) == pytest.approx(nearest_distance_cdf(dep, r), abs=0.03)


def _brute_hex(model, isd):
    # direct sum to radius R plus the continuum tail density * pi / R^2 (alpha = 4)
    R = 300.0 * isd
    pts = hex_lattice(isd, R)
    r = np.hypot(pts[:, 0], pts[:, 1])
    return float(np.sum(model(r[r > 0]))) + density_from_isd(isd, 2) * math.pi / R ** 2


@pytest.mark.parametrize("kind, h", [("l0", 0.0), ("l1", 0.4), ("l2", 0.4), ("l1", 3.0)])
def test_interference_bounds_bracket_brute_force(kind, h):
    model = PathLossModel(kind, h, 4.0)
    lo, hi = interference_bounds_hex(model, 1.0)
    brute = _brute_hex(model, 1.0)
    assert lo <= brute <= hi


def test_interference_bounds_l0_exact():
    # lower bound for L0 is 6 zeta(alpha - 1) isd^-alpha
    lo, hi = interference_bounds_hex(PathLossModel("l0", 0, 4.0), 2.0)
    assert lo == pytest.approx(6 * 1.2020569031595942 / 16, rel=1e-12)
    assert hi > lo


def test_interference_bounds_divergent():
    with pytest.raises(DivergenceError):
        interference_bounds_hex(PathLossModel("l1", 1.0, 2.0), 1.0)


def test_pointset_distances():
    ps = PointSet(np.array([[3.0, 4.0], [0.0, -1.0]]), 10.0)
    assert np.allclose(ps.distances(), [5.0, 1.0])
