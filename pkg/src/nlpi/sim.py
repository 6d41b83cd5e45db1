"""Closed-loop simulation, the S(t) Lyapunov monitor and outcome classification.

Integration is fixed-step RK4.  Every run that does not trip a guard is rerun
at half the step and the two end states are compared; if they disagree the
step is halved again, up to ``max_refinements`` times.  A run whose peak
state keeps growing under every refinement has no resolvable solution on the
horizon (a bounded smooth solution would make the refinements converge) and
is reported as diverged with reason ``escape``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend
from .certify import select_c
from .control import ControllerConfig
from .gains import gain_integral_series
from .plant import PlantConfig

__all__ = [
    "Outcome",
    "Scenario",
    "Trajectory",
    "detect_outcome",
    "s_bound_check",
    "s_series",
    "simulate",
    "write_csv",
]

HALVING_RTOL = 1e-6
ESCAPE_RATIO = 1.25


@dataclass(frozen=True)
class Scenario:
    plant: PlantConfig
    controller: ControllerConfig
    x0: float = 0.0
    y0: float = 0.0
    t_end: float = 50.0
    dt: float = 1e-3
    stride: int = 1
    guard: float = 1e6
    monitors: tuple[str, ...] = ()
    name: str = "scenario"
    epsilon0: float = 0.5

    def __post_init__(self):
        if not (self.t_end > 0 and self.dt > 0):
            raise ValueError("t_end and dt must be positive")
        if self.dt > self.t_end / 100 * (1 + 1e-12):
            raise ValueError("dt must not exceed t_end / 100")
        if self.stride < 1:
            raise ValueError("stride must be a positive integer")
        unknown = set(self.monitors) - {"s_monitor", "z_bound_monitor"}
        if unknown:
            raise ValueError(f"unknown monitors {sorted(unknown)}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def is_npi(self) -> bool:
        return self.controller.kind == "nonlinear_pi"

    def negated(self) -> "Scenario":
        return replace(self, x0=-self.x0, y0=-self.y0)


@dataclass
class Trajectory:
    """Uniformly sampled run; ``w`` holds q for nonlinear PI and zeta for NG."""

    scenario: Scenario
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    dt_used: float
    trip_reason: str | None = None
    trip_time: float | None = None
    halving_error: float | None = None
    accepted: bool = False
    refinements: int = 0
    S: np.ndarray | None = field(default=None, repr=False)
    c: float | None = None

    @property
    def z(self) -> np.ndarray:
        """z for nonlinear PI, zeta for the Nussbaum-gain loop."""
        if self.scenario.is_npi:
            return 0.5 * self.y * self.y + self.scenario.controller.lam * self.w
        return self.w

    @property
    def q(self) -> np.ndarray | None:
        return self.w if self.scenario.is_npi else None

    @property
    def u(self) -> np.ndarray:
        if self.scenario.is_npi:
            return np.asarray(self.scenario.controller.gain.kappa(self.z), dtype=float) * self.y
        return self.w * self.w * np.cos(self.w) * self.y

    @property
    def diverged(self) -> bool:
        return self.trip_reason is not None

    def end_state(self) -> np.ndarray:
        return np.array([self.x[-1], self.y[-1], self.w[-1]])


@dataclass(frozen=True)
class Outcome:
    verdict: str
    sup_abs_y: float
    tail_max: float
    reason: str | None = None
    trip_time: float | None = None


_REASONS = {1: "guard", 2: "non_finite"}


def _run(s: Scenario, dt: float, stride: int, integrate=None) -> Trajectory:
    p, k = s.plant, s.controller
    ng = k.kind == "nussbaum_gain"
    n_steps = int(round(s.t_end / dt))
    n_rows = n_steps // stride + 2
    out = np.empty((n_rows, 3))
    perturbed = p.perturbed
    x0 = s.x0 if perturbed else 0.0
    w0 = k.zeta0 if ng else 0.0
    M = p.M if perturbed else 0.0
    compilable = p.f.compilable and (ng or k.gain.compilable)
    if compilable:
        fa, fc = p.f.coeffs
        poly = np.zeros(1) if ng else np.ascontiguousarray(k.gain.poly, dtype=float)
        trig_sin = (not ng) and k.gain.trig == "sin"
        rows, trip_time, reason = (integrate or _backend.integrate)(
            perturbed, fa, fc, p.b, M, ng, k.lam, poly, trig_sin,
            x0, s.y0, w0, dt, n_steps, stride, s.guard, out,
        )
    else:
        rows, trip_time, reason = _backend.integrate_callables(
            perturbed, p.f.f, p.b, M, ng, k.lam, None if ng else k.gain.kappa,
            x0, s.y0, w0, dt, n_steps, stride, s.guard, out,
        )
    out = out[:rows]
    t = np.arange(rows) * (stride * dt)
    if reason:
        t[-1] = trip_time
    return Trajectory(
        scenario=s,
        t=t,
        x=out[:, 0].copy(),
        y=out[:, 1].copy(),
        w=out[:, 2].copy(),
        dt_used=dt,
        trip_reason=_REASONS.get(reason),
        trip_time=trip_time if reason else None,
    )


def _peak(tr: Trajectory) -> float:
    return float(max(np.abs(tr.x).max(), np.abs(tr.y).max(), np.abs(tr.w).max()))


def simulate(
    s: Scenario,
    halving: bool = True,
    max_refinements: int = 3,
    integrate=None,
) -> Trajectory:
    """Integrate the scenario with step-halving verification.

    ``integrate`` overrides the kernel (used by the parity tests and the
    benchmark).  Returns the accepted trajectory at the coarsest step that
    agrees with its half-step rerun, or the finest attempt when none does.
    """
    tr = _run(s, s.dt, s.stride, integrate)
    if not tr.diverged and halving:
        dt, stride = s.dt, s.stride
        peaks = [_peak(tr)]
        for level in range(max_refinements + 1):
            fine = _run(s, dt / 2, stride * 2, integrate)
            if fine.diverged:
                fine.refinements = level + 1
                tr = fine
                break
            a, b = tr.end_state(), fine.end_state()
            err = float(np.linalg.norm(a - b))
            if err <= HALVING_RTOL * (1.0 + float(np.linalg.norm(b))):
                tr.halving_error = err
                tr.accepted = True
                tr.refinements = level
                break
            peaks.append(_peak(fine))
            fine.halving_error = err
            fine.refinements = level + 1
            tr, dt, stride = fine, dt / 2, stride * 2
        else:
            ratios = [b / a for a, b in zip(peaks, peaks[1:])]
            if len(ratios) >= 2 and all(r >= ESCAPE_RATIO for r in ratios):
                tr.trip_reason = "escape"
                tr.trip_time = None
    if s.monitors and "s_monitor" in s.monitors and s.is_npi and s.plant.perturbed:
        try:
            c = select_c(s.plant.epsilon, s.controller.lam, s.plant.f.alpha1, s.plant.f.alpha2, s.epsilon0)
        except ValueError:
            c = None
        if c is not None:
            tr.c = c
            tr.S = s_series(tr, c)[0]
    return tr


def _s_terms(tr: Trajectory):
    s = tr.scenario
    if not (s.is_npi and s.plant.perturbed):
        raise ValueError("S is defined for nonlinear PI on the perturbed plant")
    eps, lam, b = s.plant.epsilon, s.controller.lam, s.plant.b
    M = 1.0 / eps
    x, y, z = tr.x, tr.y, tr.z
    quad = 0.5 * lam * x * x + 0.5 * M * (1.0 - eps * lam) * (x - y) ** 2
    integ = gain_integral_series(s.controller.gain, z)
    return quad, z, integ, eps, b


def s_series(tr: Trajectory, c: float):
    """S along the trajectory and the largest forward difference dS/dt."""
    quad, z, integ, eps, b = _s_terms(tr)
    S = quad + eps * c * z - b * integ
    if len(S) < 2:
        return S, 0.0
    fwd = np.diff(S) / np.diff(tr.t)
    return S, float(fwd.max())


def s_bound_check(tr: Trajectory, c: float, rtol: float = 1e-3):
    """lam x^2 + M(1-eps lam)(x-y)^2 <= 2 S(0) - 2 eps c z + 2 b int_0^z kappa.

    Both sides equal 2 S(t) + (terms) so the check is S(t) <= S(0) written
    out; the slack allowed is ``rtol * max|S|`` (zero at t = 0 exactly).
    Returns ``(ok, worst)`` with worst = max(LHS - RHS).
    """
    quad, z, integ, eps, b = _s_terms(tr)
    lhs = 2.0 * quad
    S = quad + eps * c * z - b * integ
    rhs = 2.0 * S[0] - 2.0 * eps * c * z + 2.0 * b * integ
    worst = float((lhs - rhs).max())
    return worst <= rtol * float(np.abs(S).max()), worst


def detect_outcome(tr: Trajectory, tol: float = 1e-2) -> Outcome:
    sup_y = float(np.abs(tr.y).max())
    t_end = tr.scenario.t_end
    tail = tr.t >= 0.9 * t_end - 1e-12
    if tail.any():
        tail_max = float(max(np.abs(tr.x[tail]).max(), np.abs(tr.y[tail]).max()))
    else:
        tail_max = math.inf
    if tr.diverged:
        verdict = "diverged"
    elif tail_max < tol:
        verdict = "converged"
    else:
        verdict = "bounded_not_converged"
    return Outcome(verdict, sup_y, tail_max, tr.trip_reason, tr.trip_time)


def write_csv(tr: Trajectory, path) -> None:
    """t,x,y,z_or_zeta,u[,S,q] with 17 significant digits."""
    cols = [tr.t, tr.x, tr.y, tr.z, tr.u]
    header = ["t", "x", "y", "z_or_zeta", "u"]
    if tr.q is not None:
        if tr.S is not None:
            cols.append(tr.S)
            header.append("S")
        cols.append(tr.q)
        header.append("q")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow(["%.17g" % v for v in row])
