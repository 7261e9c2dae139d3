"""Path-loss model functions.

Three models are supported, all parameterized by the antenna height
difference ``h`` and the path-loss exponent ``alpha``:

* ``L0``: r^-alpha (unbounded at the origin)
* ``L1``: (h^2 + r^2)^(-alpha/2)
* ``L2``: max(h, r)^-alpha
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError, SingularityError


class PathLossKind(str, enum.Enum):
    L0 = "l0"
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class PathLossModel:
    kind: PathLossKind
    h: float = 0.0
    alpha: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PathLossKind(self.kind))
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not self.h >= 0.0:
            raise DomainError(f"h must be >= 0, got {self.h}")
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if self.kind is PathLossKind.L0 and self.h != 0.0:
            # h has no effect for L0; normalize so equal models compare equal
            object.__setattr__(self, "h", 0.0)

    @property
    def bounded(self) -> bool:
        """True when the gain is finite at r = 0."""
        return self.kind is not PathLossKind.L0 and self.h > 0.0

    @property
    def peak(self) -> float:
        """sup_r l(r); infinite for unbounded models."""
        return self.h ** -self.alpha if self.bounded else float("inf")

    def check_dimension(self, d: int) -> None:
        """Raise unless alpha > d, which keeps the aggregate interference finite."""
        if not self.alpha > d:
            raise DivergenceError(
                f"alpha={self.alpha} must exceed the dimension d={d}")

    def with_h(self, h: float) -> "PathLossModel":
        return PathLossModel(self.kind, h, self.alpha)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "h": self.h, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, data: dict) -> "PathLossModel":
        return cls(PathLossKind(str(data["kind"]).lower()),
                   float(data.get("h", 0.0)), float(data["alpha"]))

    def __call__(self, r):
        return gain(self, r)


def gain(model: PathLossModel, r):
    """Evaluate the path-loss function at distance(s) ``r``.

    Scalars in, float out; arrays in, arrays out.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(np.isnan(r_arr)):
        raise DomainError("distance must be >= 0")
    a = model.alpha
    if model.kind is PathLossKind.L0 or model.h == 0.0:
        if np.any(r_arr == 0):
            raise SingularityError("unbounded path loss evaluated at r = 0")
        out = r_arr ** -a
    elif model.kind is PathLossKind.L1:
        out = (model.h * model.h + r_arr * r_arr) ** (-0.5 * a)
    else:
        out = np.maximum(model.h, r_arr) ** -a
    if np.ndim(out) == 0:
        return float(out)
    return out


def log_gain(model: PathLossModel, r):
    """log l(r), computed without forming tiny powers."""
    r_arr = np.asarray(r, dtype=float)
    a = model.alpha
    with np.errstate(divide="ignore"):
        if model.kind is PathLossKind.L0 or model.h == 0.0:
            out = -a * np.log(r_arr)
        elif model.kind is PathLossKind.L1:
            out = -0.5 * a * np.log(model.h * model.h + r_arr * r_arr)
        else:
            out = -a * np.log(np.maximum(model.h, r_arr))
    if np.ndim(out) == 0:
        return float(out)
    return out
