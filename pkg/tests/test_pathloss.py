import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from udn_sg.errors import DivergenceError, DomainError, SingularityError
from udn_sg.pathloss import PathLossKind, PathLossModel, gain, log_gain


def test_values():
    assert gain(PathLossModel("l0", 0, 2.0), 2.0) == pytest.approx(0.25)
    assert gain(PathLossModel("l1", 1.0, 2.0), 1.0) == pytest.approx(0.5)
    assert gain(PathLossModel("l2", 1.0, 2.0), 0.5) == pytest.approx(1.0)
    assert gain(PathLossModel("l2", 1.0, 2.0), 2.0) == pytest.approx(0.25)


def test_scalar_and_array():
    m = PathLossModel(PathLossKind.L1, 0.5, 4.0)
    assert isinstance(gain(m, 1.0), float)
    out = gain(m, np.array([0.0, 1.0, 2.0]))
    assert out.shape == (3,)
    assert out[0] == pytest.approx(0.5 ** -4)


def test_singularity_and_domain():
    with pytest.raises(SingularityError):
        gain(PathLossModel("l0", 0, 4.0), 0.0)
    with pytest.raises(SingularityError):
        gain(PathLossModel("l1", 0.0, 4.0), 0.0)
    with pytest.raises(DomainError):
        gain(PathLossModel("l1", 1.0, 4.0), -1.0)
    with pytest.raises(DomainError):
        PathLossModel("l1", -1.0, 4.0)
    with pytest.raises(ValueError):
        PathLossModel("l3", 1.0, 4.0)


def test_bounded_and_peak():
    assert not PathLossModel("l0", 0, 4.0).bounded
    assert PathLossModel("l0", 0, 4.0).peak == math.inf
    m = PathLossModel("l1", 2.0, 3.0)
    assert m.bounded and m.peak == pytest.approx(2.0 ** -3)


def test_l0_ignores_h():
    assert PathLossModel("l0", 5.0, 4.0) == PathLossModel("l0", 0.0, 4.0)


def test_check_dimension():
    PathLossModel("l1", 1.0, 2.5).check_dimension(2)
    with pytest.raises(DivergenceError):
        PathLossModel("l1", 1.0, 2.0).check_dimension(2)
    with pytest.raises(DivergenceError):
        PathLossModel("l1", 1.0, 1.0).check_dimension(1)


def test_roundtrip():
    m = PathLossModel("l2", 0.7, 3.5)
    assert PathLossModel.from_dict(m.to_dict()) == m


@given(st.sampled_from(["l0", "l1", "l2"]), st.floats(0.01, 10.0), st.floats(1.5, 6.0),
       st.floats(0.01, 100.0), st.floats(0.01, 100.0))
def test_monotone_and_ordered(kind, h, alpha, r1, r2):
    m = PathLossModel(kind, h, alpha)
    lo, hi = sorted((r1, r2))
    assert gain(m, hi) <= gain(m, lo)
    if kind != "l0":
        # bounded models never exceed the unbounded one, and L1 <= L2
        assert gain(m, lo) <= gain(PathLossModel("l0", 0, alpha), lo) * (1 + 1e-12)
        assert gain(PathLossModel("l1", h, alpha), lo) <= gain(PathLossModel("l2", h, alpha), lo) * (1 + 1e-12)


@pytest.mark.parametrize("kind", ["l0", "l1", "l2"])
def test_log_gain_matches(kind):
    m = PathLossModel(kind, 0.3, 4.0)
    r = np.array([0.1, 1.0, 1e3])
    assert np.allclose(log_gain(m, r), np.log(gain(m, r)), rtol=1e-12)
