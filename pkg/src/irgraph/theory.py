"""Closed-form predictions for the near-critical component structure.

Everything is evaluated at leading order with the empirical moment ratio
C = c_hat of the supplied weight vector; the dropped remainder terms are
only controlled asymptotically, so each prediction carries an explicit
``leading_order_only`` marker. With ell = ell_n and offset f:

* largest-component size window
    [2(1 - eps'/2) f ell^(2/3) / C - ell^(2/3) / C,
     2(1 + eps'/2) f ell^(2/3) / C]
* largest-component weight window
    [2(1 - eps') f ell^(2/3) / C, 2(1 + eps') f ell^(2/3) / C]
* surplus of the largest component scales like f^3;
* components discovered before the largest stay below
  ell^(2/3) / f^(1-eps), components after below ell^(2/3) / f;
* the expected exploration increment integrates to the drift parabola
    (m - l) (f ell^(-1/3) - (C (m + l) + 2 h) / (2 ell)) + 1
  with maximum at m = f ell^(2/3) / C and root at twice that.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphgen import critical_p
from .weights import WeightVector

__all__ = ["Prediction", "predict", "drift_curve"]


@dataclass(frozen=True)
class Prediction:
    p: float
    giant_size_interval: tuple[float, float]
    giant_weight_interval: tuple[float, float]
    giant_center: float
    surplus_scale: float
    small_before_size: float
    small_after_size: float
    drift_linear: float  # coefficient of m
    drift_quadratic: float  # coefficient of m^2 (negative curvature side)
    eps: float
    eps_prime: float
    c: float
    ell_n: float
    f: float
    leading_order_only: bool = True

    def drift(self, m) -> np.ndarray | float:
        """Leading-order expected exploration height at step m (h=0, l=1 form)."""
        m = np.asarray(m, dtype=np.float64) if not np.isscalar(m) else float(m)
        return m * self.drift_linear - self.drift_quadratic * m * m

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "giant_size_interval": list(self.giant_size_interval),
            "giant_weight_interval": list(self.giant_weight_interval),
            "giant_center": self.giant_center,
            "surplus_scale": self.surplus_scale,
            "small_before_size": self.small_before_size,
            "small_after_size": self.small_after_size,
            "drift_linear": self.drift_linear,
            "drift_quadratic": self.drift_quadratic,
            "eps": self.eps,
            "eps_prime": self.eps_prime,
            "c": self.c,
            "ell_n": self.ell_n,
            "f": self.f,
            "leading_order_only": self.leading_order_only,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text


def giant_intervals(ell: float, c: float, f: float, eps_prime: float):
    """Size and weight windows for the largest component, plus its center."""
    unit = ell ** (2.0 / 3.0) / c
    center = 2.0 * f * unit
    size = (2.0 * (1.0 - eps_prime / 2.0) * f * unit - unit,
            2.0 * (1.0 + eps_prime / 2.0) * f * unit)
    weight = (2.0 * (1.0 - eps_prime) * f * unit,
              2.0 * (1.0 + eps_prime) * f * unit)
    return size, weight, center


def predict(wv: WeightVector, f: float, eps: float, eps_prime: float) -> Prediction:
    """Evaluate the component-structure formulas at C = c_hat of ``wv``."""
    if f <= 0.0:
        raise ValueError("f must be positive")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if not 0.0 < eps_prime <= 1.0:
        raise ValueError("eps_prime must lie in (0, 1]")
    ell = wv.ell_n
    c = wv.c_hat
    (size_lo, size_hi), (weight_lo, weight_hi), center = giant_intervals(ell, c, f, eps_prime)
    return Prediction(
        p=critical_p(wv, f),
        giant_size_interval=(size_lo, size_hi),
        giant_weight_interval=(weight_lo, weight_hi),
        giant_center=center,
        surplus_scale=f**3,
        small_before_size=ell ** (2.0 / 3.0) / f ** (1.0 - eps),
        small_after_size=ell ** (2.0 / 3.0) / f,
        drift_linear=f * ell ** (-1.0 / 3.0),
        drift_quadratic=c / (2.0 * ell),
        eps=eps,
        eps_prime=eps_prime,
        c=c,
        ell_n=ell,
        f=f,
    )


def drift_curve(wv: WeightVector, f: float, h: float, l: float, m_grid) -> np.ndarray:
    """Leading-order expected exploration-height gain from step l to each m.

    Evaluates (m - l) (f ell^(-1/3) - (C (m + l) + 2 h) / (2 ell)) + 1 on
    the grid, with C = c_hat; remainder terms are dropped.
    """
    m = np.asarray(m_grid, dtype=np.float64)
    if np.any(m < 1) or np.any(m > wv.n):
        raise ValueError("grid points must lie within 1..n")
    ell = wv.ell_n
    c = wv.c_hat
    return (m - l) * (f * ell ** (-1.0 / 3.0) - (c * (m + l) + 2.0 * h) / (2.0 * ell)) + 1.0
