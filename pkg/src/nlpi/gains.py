"""PI gain functions kappa(z), their integrals and a finite-horizon Nussbaum scan.

Every built-in gain has the form ``p(z) * trig(z)`` with ``p`` a polynomial
and ``trig`` one of cos/sin.  The same two-field description is the config
grammar for custom gains, and it is what the compiled integrator consumes.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .quadrature import QuadratureError, adaptive_simpson

__all__ = [
    "GainSpec",
    "NussbaumScanReport",
    "QuadratureError",
    "BUILTIN_GAINS",
    "eval_gain",
    "gain_integral",
    "gain_integral_series",
    "get_gain",
    "nussbaum_scan",
    "parse_gain",
    "poly_trig_gain",
]

CLAIMED_CLASSES = ("nussbaum", "relaxed", "neither")


@dataclass(frozen=True)
class GainSpec:
    """A nonlinear PI gain.

    ``envelope`` / ``envelope_inverse`` describe the decomposition
    kappa(z) = alpha0(z) cos(z) with alpha0 of class K-infinity; they are only
    present for cosine-template gains.
    """

    id: str
    kappa: Callable = field(repr=False)
    integral: Callable | None = field(default=None, repr=False)
    envelope: Callable | None = field(default=None, repr=False)
    envelope_inverse: Callable | None = field(default=None, repr=False)
    claimed_class: str = "neither"
    poly: tuple[float, ...] | None = None
    trig: str | None = None

    def __post_init__(self):
        if self.claimed_class not in CLAIMED_CLASSES:
            raise ValueError(f"claimed_class must be one of {CLAIMED_CLASSES}")
        if self.trig not in (None, "cos", "sin"):
            raise ValueError("trig must be 'cos' or 'sin'")

    @property
    def compilable(self) -> bool:
        """True when the gain is fully described by (poly, trig)."""
        return self.poly is not None and self.trig is not None


def _horner(coeffs, z):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def poly_trig_gain(
    coeffs: Sequence[float],
    trig: str,
    id: str | None = None,
    claimed_class: str = "neither",
) -> GainSpec:
    """Build a custom gain ``(c0 + c1 z + c2 z^2 + ...) * trig(z)``.

    The integral is left to quadrature.  A cosine gain whose polynomial is a
    single positive monomial ``c z^n`` also gets its alpha0 envelope.
    """
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    tfun = {"cos": np.cos, "sin": np.sin}.get(trig)
    if tfun is None:
        raise ValueError(f"unknown trig factor {trig!r}; expected 'cos' or 'sin'")

    def kappa(z):
        return _horner(coeffs, z) * tfun(z)

    envelope = envelope_inverse = None
    nonzero = [(n, c) for n, c in enumerate(coeffs) if c != 0.0]
    if trig == "cos" and len(nonzero) == 1 and nonzero[0][0] >= 1 and nonzero[0][1] > 0:
        n, c = nonzero[0]
        envelope = lambda s, n=n, c=c: c * s**n  # noqa: E731
        envelope_inverse = lambda v, n=n, c=c: (v / c) ** (1.0 / n)  # noqa: E731

    if id is None:
        id = "poly:" + ",".join(repr(c) for c in coeffs) + ":" + trig
    return GainSpec(
        id=id,
        kappa=kappa,
        envelope=envelope,
        envelope_inverse=envelope_inverse,
        claimed_class=claimed_class,
        poly=coeffs,
        trig=trig,
    )


def _builtin(id, coeffs, trig, integral, claimed_class, envelope=None, inverse=None):
    g = poly_trig_gain(coeffs, trig, id=id, claimed_class=claimed_class)
    return GainSpec(
        id=id,
        kappa=g.kappa,
        integral=integral,
        envelope=envelope,
        envelope_inverse=inverse,
        claimed_class=claimed_class,
        poly=g.poly,
        trig=trig,
    )


def _int_z_cos(z):
    return z * np.sin(z) + np.cos(z) - 1.0


def _int_z2_cos(z):
    return z * z * np.sin(z) + 2.0 * z * np.cos(z) - 2.0 * np.sin(z)


def _int_z2_sin(z):
    return -z * z * np.cos(z) + 2.0 * z * np.sin(z) + 2.0 * np.cos(z) - 2.0


def _square(s):
    return s * s


def _identity(s):
    return s


BUILTIN_GAINS: dict[str, GainSpec] = {
    g.id: g
    for g in (
        # integral z sin z + cos z - 1 is unbounded both ways, its average is not
        _builtin("z_cos_z", (0.0, 1.0), "cos", _int_z_cos, "relaxed", _identity, _identity),
        _builtin("z2_cos_z", (0.0, 0.0, 1.0), "cos", _int_z2_cos, "nussbaum", _square, np.sqrt),
        _builtin("z2_sin_z", (0.0, 0.0, 1.0), "sin", _int_z2_sin, "nussbaum"),
        _builtin("zeta2_cos_zeta", (0.0, 0.0, 1.0), "cos", _int_z2_cos, "nussbaum", _square, np.sqrt),
    )
}


def parse_gain(text: str) -> GainSpec:
    """Resolve a gain from a built-in id or ``poly:c0,c1,...:cos|sin``."""
    text = text.strip()
    if text in BUILTIN_GAINS:
        return BUILTIN_GAINS[text]
    if text.startswith("poly:"):
        try:
            _, coeff_text, trig = text.split(":")
            coeffs = [float(c) for c in coeff_text.split(",")]
        except ValueError:
            raise ValueError(f"malformed gain expression {text!r}") from None
        return poly_trig_gain(coeffs, trig)
    raise ValueError(
        f"unknown gain {text!r}; built-ins: {', '.join(BUILTIN_GAINS)}"
    )


def get_gain(spec) -> GainSpec:
    """Accept a GainSpec, a gain string, or a ``{poly=[...], trig=...}`` mapping."""
    if isinstance(spec, GainSpec):
        return spec
    if isinstance(spec, str):
        return parse_gain(spec)
    if isinstance(spec, dict):
        if "id" in spec and "poly" not in spec:
            return parse_gain(spec["id"])
        return poly_trig_gain(
            spec["poly"],
            spec["trig"],
            id=spec.get("id"),
            claimed_class=spec.get("claimed_class", "neither"),
        )
    raise TypeError(f"cannot build a gain from {type(spec).__name__}")


def eval_gain(g: GainSpec, z: float) -> float:
    return float(g.kappa(z))


def gain_integral(g: GainSpec, z: float, tol: float = 1e-10) -> float:
    """int_0^z kappa(s) ds, closed form when the gain has one."""
    if g.integral is not None:
        return float(g.integral(z))
    return adaptive_simpson(lambda s: float(g.kappa(s)), 0.0, float(z), tol=tol)


def gain_integral_series(g: GainSpec, z, tol: float = 1e-10) -> np.ndarray:
    """Integral of kappa from 0 to each entry of ``z``.

    Without a closed form the integral is accumulated along the sequence, one
    quadrature per consecutive pair, which is cheap for trajectory samples.
    """
    z = np.asarray(z, dtype=float)
    if g.integral is not None:
        return np.asarray(g.integral(z), dtype=float)
    out = np.empty_like(z)
    flat = z.ravel()
    res = out.ravel()
    f = lambda s: float(g.kappa(s))  # noqa: E731
    prev_z, prev_val = 0.0, 0.0
    for i, zi in enumerate(flat):
        prev_val += adaptive_simpson(f, prev_z, float(zi), tol=tol)
        prev_z = float(zi)
        res[i] = prev_val
    return out


@dataclass(frozen=True)
class NussbaumScanReport:
    z_max: float
    samples: int
    sup_avg: float
    inf_avg: float
    sup_int: float
    inf_int: float
    relaxed_property: bool
    verdict: str
    z_grid: np.ndarray = field(repr=False, compare=False)
    averages: np.ndarray = field(repr=False, compare=False)


def nussbaum_scan(
    g: GainSpec,
    z_max: float,
    samples: int,
    threshold: float = 10.0,
    bound: float = 5.0,
) -> NussbaumScanReport:
    """Scan the running average (1/z) int_0^z kappa on a uniform grid over (0, z_max].

    Verdicts, in order of precedence:

    * ``consistent_with_nussbaum``: the average exceeds +threshold and drops
      below -threshold somewhere on the grid;
    * ``bounded_average``: |average| < bound everywhere;
    * ``consistent_with_relaxed_only``: only the unscaled integral crosses
      +/-threshold;
    * ``inconclusive``: none of the above at this horizon.

    A finite scan can only be consistent with an asymptotic property, never
    prove it.
    """
    if not z_max > 0:
        raise ValueError("z_max must be positive")
    if samples < 100:
        raise ValueError("samples must be at least 100")
    z = z_max * np.arange(1, samples + 1) / samples
    integ = gain_integral_series(g, z)
    avg = integ / z
    sup_avg, inf_avg = float(avg.max()), float(avg.min())
    sup_int, inf_int = float(integ.max()), float(integ.min())
    relaxed = sup_int > threshold and inf_int < -threshold
    if sup_avg > threshold and inf_avg < -threshold:
        verdict = "consistent_with_nussbaum"
    elif float(np.abs(avg).max()) < bound:
        verdict = "bounded_average"
    elif relaxed:
        verdict = "consistent_with_relaxed_only"
    else:
        verdict = "inconclusive"
    return NussbaumScanReport(
        z_max=float(z_max),
        samples=int(samples),
        sup_avg=sup_avg,
        inf_avg=inf_avg,
        sup_int=sup_int,
        inf_int=inf_int,
        relaxed_property=relaxed,
        verdict=verdict,
        z_grid=z,
        averages=avg,
    )

