"""Nussbaum-gain and nonlinear PI controllers.

Nussbaum gain (NG):   u = zeta^2 cos(zeta) y,   zeta' = y^2
Nonlinear PI (nPI):   u = kappa(z) y,   z = y^2/2 + lam * q,   q' = y^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import zk
from .gains import GainSpec, get_gain
from .plant import PlantConfig

__all__ = [
    "ControllerConfig",
    "ControllerState",
    "InapplicableCheck",
    "ng_control",
    "npi_control",
    "z_dot_bound_check",
]


class InapplicableCheck(ValueError):
    """A monitor was requested for a configuration it does not cover."""


@dataclass(frozen=True)
class ControllerConfig:
    kind: str
    lam: float = 0.0
    gain: GainSpec | None = None
    zeta0: float = 0.0

    def __post_init__(self):
        if self.kind == "nonlinear_pi":
            if not self.lam > 0:
                raise ValueError("nonlinear PI needs lam > 0")
            if self.gain is None:
                raise ValueError("nonlinear PI needs a gain")
            object.__setattr__(self, "gain", get_gain(self.gain))
        elif self.kind != "nussbaum_gain":
            raise ValueError("controller kind must be 'nussbaum_gain' or 'nonlinear_pi'")


@dataclass
class ControllerState:
    zeta: float = 0.0
    q: float = 0.0


def ng_control(y: float, zeta: float) -> tuple[float, float]:
    return zeta * zeta * math.cos(zeta) * y, y * y


def npi_control(y: float, q: float, cfg: ControllerConfig) -> tuple[float, float, float]:
    """Return ``(u, z, dq)``; z is rebuilt from (y, q) rather than integrated."""
    z = 0.5 * y * y + cfg.lam * q
    return float(cfg.gain.kappa(z)) * y, z, y * y


def z_dot_bound_check(tr, cfg: ControllerConfig, plant: PlantConfig, rtol: float = 1e-3):
    """Check z' <= [max|alpha| + lam - |b| alpha0(2k pi)] y^2 where z crosses z_k.

    Only meaningful for unperturbed plants and cosine-template gains.  z' is a
    central difference of the sampled z; a sample counts as "at z_k" when z_k
    lies between it and a neighbour.

    Returns ``(ok, checked)`` with the list of ``(k, t, zdot, bound)`` tuples
    that were examined.
    """
    if plant.kind != "unperturbed":
        raise InapplicableCheck("the z-derivative bound covers unperturbed plants only")
    if cfg.kind != "nonlinear_pi" or cfg.gain.envelope is None:
        raise InapplicableCheck("gain has no alpha0 envelope (not of the cos template)")

    t = np.asarray(tr.t)
    z = np.asarray(tr.z)
    y = np.asarray(tr.y)
    amax = max(abs(plant.f.alpha1), abs(plant.f.alpha2))
    b = plant.b
    checked = []
    ok = True
    if len(z) < 3:
        return ok, checked
    k_top = int(max(0.0, z.max()) / (2.0 * math.pi)) + 1
    for k in range(k_top + 1):
        target = zk(k, b)
        # samples i where target lies in [min(z[i], z[i+1]), max(...)]
        lo = np.minimum(z[:-1], z[1:])
        hi = np.maximum(z[:-1], z[1:])
        idx = np.nonzero((lo <= target) & (target <= hi))[0]
        for i in idx:
            j = i if abs(z[i] - target) <= abs(z[i + 1] - target) else i + 1
            j = min(max(j, 1), len(z) - 2)
            zdot = (z[j + 1] - z[j - 1]) / (t[j + 1] - t[j - 1])
            bound = (amax + cfg.lam - abs(b) * float(cfg.gain.envelope(2 * k * math.pi))) * y[j] ** 2
            slack = rtol * (1.0 + abs(bound) + abs(zdot))
            good = zdot <= bound + slack
            ok = ok and good
            checked.append((k, float(t[j]), float(zdot), float(bound)))
    return ok, checked
