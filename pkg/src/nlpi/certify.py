"""Numeric certificate for global boundedness/attractivity of the nonlinear PI loop.

Conditions checked for the perturbed plant with sector [alpha1, alpha2],
filter constant eps and PI leak lam:

  (i)   eps*lam < 1 and eps*(lam + alpha2) < 1
  (ii)  alpha2 - alpha1 <= 2 lam / sqrt(1 - eps lam)
                         * [sqrt(1 - eps(lam+alpha1)) + sqrt(1 - eps(lam+alpha2))]
  (iii) the gain has the Nussbaum property (finite-horizon scan), or the
        relaxed integral property when c2(alpha2) >= 0.

On top of these the Lyapunov matrix Lambda(alpha) is checked positive definite
on a dense alpha grid at the selected constant c.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .gains import GainSpec, nussbaum_scan

__all__ = [
    "CertificateError",
    "CertificateReport",
    "certify",
    "check_condition_i",
    "check_condition_ii",
    "discriminant_identity_check",
    "k0_bound",
    "k_prime",
    "lambda_matrix",
    "lambda_minors",
    "pd_grid_check",
    "root_c1",
    "root_c2",
    "select_c",
    "zk",
]


class CertificateError(ValueError):
    """A certificate quantity is undefined for the given parameters."""


def check_condition_i(epsilon: float, lam: float, alpha2: float) -> bool:
    return epsilon * lam < 1.0 and epsilon * (lam + alpha2) < 1.0


def check_condition_ii(epsilon: float, lam: float, alpha1: float, alpha2: float):
    """Return ``(holds, slack)`` with slack = RHS - (alpha2 - alpha1)."""
    k = 1.0 - epsilon * lam
    r1 = 1.0 - epsilon * (lam + alpha1)
    r2 = 1.0 - epsilon * (lam + alpha2)
    if k <= 0 or r1 < 0 or r2 < 0:
        raise CertificateError("condition (i) prerequisite violated")
    rhs = 2.0 * lam / math.sqrt(k) * (math.sqrt(r1) + math.sqrt(r2))
    slack = rhs - (alpha2 - alpha1)
    return slack >= 0.0, slack


def _radicand(alpha, epsilon, lam):
    k = 1.0 - epsilon * lam
    rad = k * (k - epsilon * alpha)
    if k <= 0 or np.any(np.asarray(rad) < 0):
        raise CertificateError("negative radicand: need 1 - eps*lam > 0 and 1 - eps*(lam+alpha) >= 0")
    return k, rad


def root_c1(alpha, epsilon: float, lam: float):
    """Smaller root in c of the second minor of Lambda(alpha)."""
    k, rad = _radicand(alpha, epsilon, lam)
    return -(k * (2.0 * lam + alpha) + 2.0 * lam * np.sqrt(rad)) / epsilon


def root_c2(alpha, epsilon: float, lam: float):
    """Larger root; c2(0) = 0 and c2 decreases in alpha."""
    k, rad = _radicand(alpha, epsilon, lam)
    # + 0.0 turns the -0.0 at alpha = 0 into +0.0
    return -(k * (2.0 * lam + alpha) - 2.0 * lam * np.sqrt(rad)) / epsilon + 0.0


def select_c(epsilon: float, lam: float, alpha1: float, alpha2: float, epsilon0: float = 0.5) -> float:
    """Blend the lower and upper admissible c.

    The lower end is max(c1(alpha1), c1(alpha2)): c1 falls then rises in
    alpha, so its maximum over the sector sits at one of the two ends.  For
    eps*lam > 1/2 it can be the right end.
    """
    if not 0.0 < epsilon0 < 1.0:
        raise ValueError("epsilon0 must lie in (0, 1)")
    lo = max(float(root_c1(alpha1, epsilon, lam)), float(root_c1(alpha2, epsilon, lam)))
    hi = float(root_c2(alpha2, epsilon, lam))
    if not lo < hi:
        raise CertificateError("condition (ii) infeasible: no c between the roots")
    c = epsilon0 * lo + (1.0 - epsilon0) * hi
    # rounding can push an extreme blend onto an endpoint
    return min(max(c, math.nextafter(lo, hi)), math.nextafter(hi, lo))


def lambda_minors(alpha, c: float, epsilon: float, lam: float):
    k = 1.0 - epsilon * lam
    d1 = 1.0 - epsilon * (lam + alpha)
    ce = c * epsilon * epsilon
    d2 = d1 * k * (ce + 1.0) - 0.25 * (ce + k * (2.0 - epsilon * alpha)) ** 2
    return d1, d2


def lambda_matrix(alpha, c: float, epsilon: float, lam: float) -> np.ndarray:
    """The symmetric 2x2 matrix with S' = -M^2 [x y] Lambda [x y]^T.

    Array ``alpha`` gives shape (2, 2, n).
    """
    alpha = np.asarray(alpha, dtype=float)
    k = 1.0 - epsilon * lam
    ce = c * epsilon * epsilon
    off = -0.5 * (ce + k * (2.0 - epsilon * alpha))
    d22 = np.full_like(alpha, k * (ce + 1.0))
    return np.array([[1.0 - epsilon * (lam + alpha), off], [off, d22]])


def discriminant_identity_check(alpha: float, epsilon: float, lam: float, rtol: float = 1e-12):
    """Compare B^2 - 4 A Gamma against 16 eps^6 lam^2 (1-eps lam)(1-eps(lam+alpha))."""
    k = 1.0 - epsilon * lam
    a_c = epsilon**4
    b_c = 2.0 * epsilon**3 * k * (alpha + 2.0 * lam)
    g_c = epsilon**2 * k * alpha * (4.0 * lam + k * alpha)
    lhs = b_c * b_c - 4.0 * a_c * g_c
    rhs = 16.0 * epsilon**6 * lam**2 * k * (1.0 - epsilon * (lam + alpha))
    ok = abs(lhs - rhs) <= rtol * (1.0 + abs(rhs))
    return lhs, rhs, ok


def pd_grid_check(epsilon, lam, alpha1, alpha2, c, n=1001):
    """Minima of both minors over an alpha grid, plus the smallest eigenvalue."""
    alphas = np.linspace(alpha1, alpha2, n)
    d1, d2 = lambda_minors(alphas, c, epsilon, lam)
    mats = np.moveaxis(lambda_matrix(alphas, c, epsilon, lam), -1, 0)
    min_eig = float(np.linalg.eigvalsh(mats)[:, 0].min())
    return float(d1.min()), float(d2.min()), min_eig


def zk(k: int, b: float) -> float:
    return (math.pi / 2.0) * (4 * k + 1 + math.copysign(1.0, b))


def k0_bound(g: GainSpec, b: float, alpha1: float, alpha2: float, lam: float) -> int:
    """Smallest k with |b| alpha0(2 k pi) >= max(|alpha1|, |alpha2|) + lam.

    Rounded up: rounding down would not guarantee z' <= 0 at z_k0.
    """
    if g.envelope_inverse is None:
        raise CertificateError(f"gain {g.id!r} has no alpha0 envelope inverse")
    if b == 0:
        raise CertificateError("b must be nonzero")
    level = (max(abs(alpha1), abs(alpha2)) + lam) / abs(b)
    return max(0, math.ceil(float(g.envelope_inverse(level)) / (2.0 * math.pi)))


def k_prime(g: GainSpec, b, alpha1, alpha2, lam, y0) -> int:
    return max(k0_bound(g, b, alpha1, alpha2, lam), math.ceil(y0 * y0 / (4.0 * math.pi)))


@dataclass(frozen=True)
class CertificateReport:
    cond_i: bool
    cond_ii: bool | None
    cond_ii_slack: float | None
    cond_iii: str
    cond_iii_via: str | None
    c1_at_alpha1: float | None
    c2_at_alpha2: float | None
    c_selected: float | None
    min_delta1: float | None
    min_delta2: float | None
    min_eigenvalue: float | None
    relaxed_applicable: bool | None

    @property
    def pd_ok(self) -> bool:
        return (
            self.c_selected is not None
            and self.min_delta1 > 0
            and self.min_delta2 > 0
            and self.min_eigenvalue > 0
        )

    @property
    def feasible(self) -> bool:
        return bool(self.cond_i and self.cond_ii and self.pd_ok and self.cond_iii_via)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pd_ok"] = self.pd_ok
        d["feasible"] = self.feasible
        return d


def certify(
    epsilon: float,
    lam: float,
    alpha1: float,
    alpha2: float,
    gain: GainSpec,
    epsilon0: float = 0.5,
    grid: int = 1001,
    scan_zmax: float = 200 * math.pi,
    scan_samples: int = 20000,
    scan=None,
) -> CertificateReport:
    """Evaluate conditions (i)-(iii) and the positive-definiteness certificate.

    ``scan`` may carry a precomputed NussbaumScanReport for ``gain``.
    """
    if scan is None:
        scan = nussbaum_scan(gain, scan_zmax, scan_samples)
    cond_i = check_condition_i(epsilon, lam, alpha2)
    empty = dict(
        cond_ii=None, cond_ii_slack=None, c1_at_alpha1=None, c2_at_alpha2=None,
        c_selected=None, min_delta1=None, min_delta2=None, min_eigenvalue=None,
        relaxed_applicable=None,
    )
    via = "nussbaum" if scan.verdict == "consistent_with_nussbaum" else None
    if not cond_i or epsilon * (lam + alpha1) >= 1.0:
        return CertificateReport(cond_i=cond_i, cond_iii=scan.verdict, cond_iii_via=via, **empty)

    cond_ii, slack = check_condition_ii(epsilon, lam, alpha1, alpha2)
    c1 = float(root_c1(alpha1, epsilon, lam))
    c2 = float(root_c2(alpha2, epsilon, lam))
    relaxed = c2 >= 0.0
    if via is None and relaxed and scan.relaxed_property:
        via = "relaxed"
    try:
        c = select_c(epsilon, lam, alpha1, alpha2, epsilon0)
    except CertificateError:
        c = None
    d1 = d2 = eig = None
    if c is not None:
        d1, d2, eig = pd_grid_check(epsilon, lam, alpha1, alpha2, c, grid)
    return CertificateReport(
        cond_i=cond_i,
        cond_ii=cond_ii,
        cond_ii_slack=slack,
        cond_iii=scan.verdict,
        cond_iii_via=via,
        c1_at_alpha1=c1,
        c2_at_alpha2=c2,
        c_selected=c,
        min_delta1=d1,
        min_delta2=d2,
        min_eigenvalue=eig,
        relaxed_applicable=relaxed,
    )
