import math

import numpy as np
import pytest

from udn_sg import analytic, mcsim, rate
from udn_sg.analytic import Scenario
from udn_sg.errors import DomainError
from udn_sg.geometry import Deployment, DeploymentKind
from udn_sg.pathloss import PathLossModel

FAST = mcsim.MCConfig(trials=4000, seed=1)


def sc(kind, d, density, model, noise=0.0):
    return Scenario(Deployment(kind, d, density), model, 1.0, noise)


def test_reproducible_and_streams_differ():
    s = sc(DeploymentKind.PPP, 2, 1.0, PathLossModel("l1", 0.5, 4.0))
    a = mcsim.simulate_sinr(s, FAST)
    b = mcsim.simulate_sinr(s, FAST)
    c = mcsim.simulate_sinr(s, FAST, stream=1)
    assert np.array_equal(a.sinr, b.sinr)
    assert not np.array_equal(a.sinr, c.sinr)


def test_workers_do_not_change_results():
    s = sc(DeploymentKind.HEX, 2, 1.0, PathLossModel("l0", 0, 4.0))
    cfg = mcsim.MCConfig(trials=3000, seed=4, chunk_trials=500)
    a = mcsim.simulate_sinr(s, cfg)
    b = mcsim.simulate_sinr(s, mcsim.MCConfig(trials=3000, seed=4, chunk_trials=500, workers=3))
    assert np.array_equal(a.sinr, b.sinr)


@pytest.mark.parametrize("kind, d, model, T", [
    (DeploymentKind.PPP, 2, PathLossModel("l0", 0, 4.0), 1.0),
    (DeploymentKind.PPP, 1, PathLossModel("l1", 0.5, 2.0), 0.5),
    (DeploymentKind.LINE, 1, PathLossModel("l1", 0.3, 3.0), 2.0),
    (DeploymentKind.HEX, 2, PathLossModel("l1", 0.5, 4.0), 1.0),
])
def test_coverage_matches_analytic(kind, d, model, T):
    s = sc(kind, d, 1.0, model, noise=0.02)
    est = mcsim.simulate_coverage(s, T, mcsim.MCConfig(trials=20000, seed=11))
    # 3 CI half-widths is about 6 standard errors
    assert abs(est.mean - analytic.coverage_probability(s, T)) < 3 * est.ci95_halfwidth


def test_l2_with_tiny_height_matches_l0():
    s = sc(DeploymentKind.PPP, 2, 1.0, PathLossModel("l2", 1e-6, 4.0))
    est = mcsim.simulate_coverage(s, 1.0, mcsim.MCConfig(trials=20000, seed=5))
    assert abs(est.mean - 1 / (1 + math.pi / 4)) < 3 * est.ci95_halfwidth


def test_fading_equivalent_density():
    assert mcsim.fading_equivalent_density(1.0, 2, 4.0) == pytest.approx(1 / math.gamma(1.5))
    with pytest.raises(DomainError):
        mcsim.fading_equivalent_density(0.0, 2, 4.0)


def test_collocated_user_matches_closed_form():
    model = PathLossModel("l1", 0.8, 3.0)
    s = sc(DeploymentKind.LINE, 1, 2.0, model, noise=0.01)
    cfg = mcsim.MCConfig(trials=50, seed=2, fading="none", collocated_user=True)
    est = mcsim.simulate_rate(s, cfg)
    assert est.mean == pytest.approx(rate.tau0_collocated(s).value, rel=1e-4)
    assert est.ci95_halfwidth < 1e-10


def test_binomial_estimate():
    est = mcsim.binomial_estimate(np.arange(10000) % 2 == 0)
    assert est.mean == 0.5
    assert est.ci95_halfwidth == pytest.approx(1.96 * 0.005)
    # clipped p keeps the interval open when every trial hits
    assert mcsim.binomial_estimate(np.ones(100, dtype=bool)).ci95_halfwidth > 0


def test_rate_from_samples_gamma0():
    samples = mcsim.SINRSamples(np.ones(4), np.array([0.0, 1.0, 3.0, 7.0]))
    assert mcsim.rate_from_samples(samples).mean == pytest.approx(1.5)
    assert mcsim.rate_from_samples(samples, 1.0).mean == pytest.approx((0 + 0 + 1 + 2) / 4)


@pytest.mark.parametrize("model, d", [(PathLossModel("l0", 0, 4.0), 2), (PathLossModel("l1", 1.0, 3.0), 1),
                                      (PathLossModel("l2", 1.0, 4.0), 2)])
def test_auto_window_meets_tail_tolerance(model, d):
    s = sc(DeploymentKind.PPP, d, 1.0, model)
    R = mcsim.auto_window(s, 1e-3)
    r0 = mcsim.typical_distance(s)
    assert mcsim.tail_moment(model, d, R) <= 1e-3 * mcsim.tail_moment(model, d, r0)
    assert mcsim.tail_moment(model, d, R / 2) > 1e-3 * mcsim.tail_moment(model, d, r0) or R == 4 * r0


def test_tail_moment_quadrature():
    from scipy import integrate
    for model, d in [(PathLossModel("l1", 0.7, 3.0), 1), (PathLossModel("l1", 0.7, 3.0), 2),
                     (PathLossModel("l2", 2.0, 4.0), 2), (PathLossModel("l2", 2.0, 4.0), 1)]:
        R = 1.3
        val, _ = integrate.quad(lambda x: x ** (d - 1) * model(x), R, np.inf, epsrel=1e-12, points=None)
        assert mcsim.tail_moment(model, d, R) == pytest.approx(val, rel=1e-9)


def test_window_cap_warns():
    s = sc(DeploymentKind.PPP, 2, 1.0, PathLossModel("l1", 1.0, 2.5))
    with pytest.warns(RuntimeWarning):
        mcsim.auto_window(s, 1e-3, max_points_per_trial=500)


def test_dump_trials(tmp_path):
    s = sc(DeploymentKind.PPP, 1, 1.0, PathLossModel("l0", 0, 2.0))
    path = tmp_path / "trials.csv"
    mcsim.simulate_sinr(s, mcsim.MCConfig(trials=20, seed=0, dump_path=str(path)))
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,r,sinr" and len(lines) == 21


def test_ks_distance():
    x = np.linspace(0, 1, 1000)
    assert mcsim.ks_distance(x, x) == 0.0
    assert mcsim.ks_distance(x, x + 2) == 1.0


def test_config_validation():
    with pytest.raises(DomainError):
        mcsim.MCConfig(trials=0)
    with pytest.raises(DomainError):
        mcsim.MCConfig(window_radius=-1.0)
    with pytest.raises(ValueError):
        mcsim.MCConfig(fading="nakagami")
