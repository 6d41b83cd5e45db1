"""First-order plants with sector-bounded drift and an optional parasitic filter.

    perturbed:    x' = f(x) + b u,   y' = M (x - y),   M = 1/epsilon
    unperturbed:  y' = f(y) + b u    (x is unused and held constant)
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PlantConfig",
    "SectorNonlinearity",
    "eval_f",
    "get_nonlinearity",
    "linear",
    "plant_rates",
    "sin2_sector",
    "verify_sector",
    "zero_map",
]


@dataclass(frozen=True)
class SectorNonlinearity:
    """f(x) = alpha(x) x with alpha1 <= alpha(x) <= alpha2.

    ``coeffs = (a, c)`` marks the compilable family alpha(x) = a + c sin(x)^2;
    arbitrary callables are allowed but run on the pure-Python integrator.
    """

    f: Callable = field(repr=False)
    alpha1: float
    alpha2: float
    name: str = "custom"
    coeffs: tuple[float, float] | None = None

    def __post_init__(self):
        if self.alpha1 > self.alpha2:
            raise ValueError("sector bounds need alpha1 <= alpha2")

    def __call__(self, x):
        return self.f(x)

    @property
    def compilable(self) -> bool:
        return self.coeffs is not None


def sin2_sector(a: float, c: float, name: str | None = None) -> SectorNonlinearity:
    """alpha(x) = a + c sin^2(x); sector [min(a, a+c), max(a, a+c)]."""
    a, c = float(a), float(c)

    def f(x):
        s = np.sin(x)
        return (a + c * s * s) * x

    lo, hi = sorted((a, a + c))
    return SectorNonlinearity(f, lo, hi, name=name or f"sin2({a!r},{c!r})", coeffs=(a, c))


def linear(alpha: float) -> SectorNonlinearity:
    alpha = float(alpha)
    return SectorNonlinearity(
        lambda x: alpha * x, alpha, alpha, name=f"linear({alpha!r})", coeffs=(alpha, 0.0)
    )


def zero_map() -> SectorNonlinearity:
    return SectorNonlinearity(lambda x: 0.0 * x, 0.0, 0.0, name="zero", coeffs=(0.0, 0.0))


def get_nonlinearity(spec) -> SectorNonlinearity:
    """Resolve ``f`` from a config value.

    Accepted: a SectorNonlinearity; ``"zero"``; ``"sector_sin2"`` (the
    3[1 + sin^2 x] x example); or a mapping ``{id="linear", alpha=...}`` /
    ``{id="sin2", a=..., c=...}``, optionally with ``alpha1``/``alpha2``
    overriding the derived sector.
    """
    if isinstance(spec, SectorNonlinearity):
        return spec
    if isinstance(spec, str):
        spec = {"id": spec}
    if not isinstance(spec, dict):
        raise TypeError(f"cannot build a nonlinearity from {type(spec).__name__}")
    kind = spec.get("id")
    if kind == "zero":
        s = zero_map()
    elif kind == "linear":
        s = linear(spec["alpha"])
    elif kind == "sector_sin2":
        s = sin2_sector(3.0, 3.0, name="sector_sin2")
    elif kind == "sin2":
        s = sin2_sector(spec["a"], spec["c"])
    else:
        raise ValueError(f"unknown nonlinearity id {kind!r}")
    if "alpha1" in spec or "alpha2" in spec:
        s = SectorNonlinearity(
            s.f,
            float(spec.get("alpha1", s.alpha1)),
            float(spec.get("alpha2", s.alpha2)),
            name=s.name,
            coeffs=s.coeffs,
        )
    return s


@dataclass(frozen=True)
class PlantConfig:
    kind: str
    f: SectorNonlinearity
    b: float
    epsilon: float = 1.0

    def __post_init__(self):
        if self.kind not in ("perturbed", "unperturbed"):
            raise ValueError("plant kind must be 'perturbed' or 'unperturbed'")
        if self.b == 0:
            raise ValueError("control coefficient b must be nonzero")
        if self.kind == "perturbed" and not self.epsilon > 0:
            raise ValueError("epsilon must be positive for a perturbed plant")

    @property
    def M(self) -> float:
        return 1.0 / self.epsilon

    @property
    def perturbed(self) -> bool:
        return self.kind == "perturbed"


def eval_f(s: SectorNonlinearity, x: float) -> float:
    return float(s.f(x))


def verify_sector(s: SectorNonlinearity, x_min: float, x_max: float, n: int):
    """Sample f(x)/x on a grid and compare against [alpha1, alpha2].

    Grid points within one step of 0 are replaced by the two-sided difference
    quotient (f(h) - f(-h)) / 2h, which tends to alpha(0).

    Returns ``(ok, margin)`` where margin is the smallest distance of a sampled
    ratio to the sector boundary, negative when a sample falls outside.
    """
    if not x_min < x_max:
        raise ValueError("need x_min < x_max")
    if n < 2:
        raise ValueError("need at least two grid points")
    xs = np.linspace(x_min, x_max, n)
    step = (x_max - x_min) / (n - 1)
    near = np.abs(xs) < step
    ratios = np.empty(n)
    far = ~near
    ratios[far] = np.asarray(s.f(xs[far]), dtype=float) / xs[far]
    if near.any():
        h = 0.5 * step
        ratios[near] = (float(s.f(h)) - float(s.f(-h))) / (2.0 * h)
    # signed distance to the interval: positive inside
    margin = np.minimum(ratios - s.alpha1, s.alpha2 - ratios)
    tol = 1e-12 * max(1.0, abs(s.alpha1), abs(s.alpha2))
    worst = float(margin.min())
    ok = worst >= -tol
    if ok:
        worst = max(worst, 0.0)
    return ok, worst


def plant_rates(p: PlantConfig, x: float, y: float, u: float) -> tuple[float, float]:
    if p.kind == "unperturbed":
        return 0.0, float(p.f(y)) + p.b * u
    return float(p.f(x)) + p.b * u, p.M * (x - y)
