"""Acceptance criteria 1-9, one test each; a PASS/FAIL line per criterion is
printed in the terminal summary."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import record_criterion
from nlpi.certify import (
    certify,
    check_condition_i,
    check_condition_ii,
    discriminant_identity_check,
    k_prime,
    lambda_minors,
    root_c2,
    select_c,
    zk,
)
from nlpi.control import z_dot_bound_check
from nlpi.gains import BUILTIN_GAINS, nussbaum_scan
from nlpi.sim import detect_outcome, s_bound_check, s_series, simulate

FIG1 = ("fig1_pint_ng", "fig1_pint_npi", "fig1_pint_npin", "fig1_pls_ng", "fig1_pls_npi", "fig1_pls_npin")
FIG_ALL = FIG1 + ("fig2_sector",)


@pytest.fixture(scope="module")
def runs(preset):
    out = {}
    for name in FIG_ALL + ("unperturbed_sector",):
        start = time.perf_counter()
        tr = simulate(preset(name))
        out[name] = (tr, detect_outcome(tr), time.perf_counter() - start)
    return out


def test_criterion_1_fig1_outcomes(runs):
    o = {name: runs[name][1] for name in FIG1}
    slowest = max(runs[name][2] for name in FIG1)
    checks = {
        "pint_ng guard": o["fig1_pint_ng"].verdict == "diverged" and o["fig1_pint_ng"].reason == "guard",
        "pint_npi tail<1e-2": o["fig1_pint_npi"].tail_max < 1e-2,
        "pls_npi not converged": o["fig1_pls_npi"].verdict != "converged",
        "pls_npin tail<1e-2": o["fig1_pls_npin"].tail_max < 1e-2,
        "seconds per run": slowest < 30.0,
    }
    ok = all(checks.values())
    record_criterion(1, ok, f"{checks} pls_npi={o['fig1_pls_npi'].verdict}/{o['fig1_pls_npi'].reason} "
                            f"slowest={slowest:.2f}s")
    assert ok


def test_criterion_2_fig2_outcome_and_certificate(runs):
    tr, o, _ = runs["fig2_sector"]
    s = tr.scenario
    cert = certify(s.plant.epsilon, s.controller.lam, s.plant.f.alpha1, s.plant.f.alpha2, s.controller.gain)
    _, slack = check_condition_ii(0.1, 2.5, 3.0, 6.0)
    rhs = slack + 3.0
    ok = (
        o.verdict == "converged" and o.tail_max < 1e-2
        and cert.cond_i and cert.cond_ii
        and abs(cert.cond_ii_slack - 3.11) <= 0.01
        and abs(rhs - 6.109) <= 1e-3
        and s.plant.f.alpha2 - s.plant.f.alpha1 == 3.0
    )
    record_criterion(2, ok, f"verdict={o.verdict} tail_max={o.tail_max:.3g} slack={cert.cond_ii_slack:.6f} "
                            f"rhs={rhs:.6f}")
    assert ok


def test_criterion_3_lyapunov_monitor(runs):
    tr, _, _ = runs["fig2_sector"]
    c = select_c(0.1, 2.5, 3.0, 6.0, epsilon0=0.5)
    S, fwd = s_series(tr, c)
    smax = float(np.abs(S).max())
    holds, worst = s_bound_check(tr, c)
    ok = abs(c - (-77.39)) <= 0.01 and fwd <= 1e-3 * smax and holds and tr.c == c
    record_criterion(3, ok, f"c={c:.5f} max_fwd_diff={fwd:.3g} max|S|={smax:.4g} ineq_worst={worst:.3g}")
    assert ok


def _disc_oracle(alpha, eps, lam):
    """Exact discriminant in c of det(Lambda), normalised to leading coefficient eps^4.

    The determinant is rebuilt in rational arithmetic from its matrix entries
    at three values of t = c eps^2, then the quadratic in t is recovered.
    """
    alpha, eps, lam = Fraction(alpha), Fraction(eps), Fraction(lam)
    k = 1 - eps * lam

    def det(t):
        a11 = 1 - eps * (lam + alpha)
        a12 = -(t + k * (2 - eps * alpha)) / 2
        a22 = k * (t + 1)
        return a11 * a22 - a12 * a12

    d = [det(Fraction(t)) for t in (-1, 0, 1)]
    a_t = (d[0] + d[2]) / 2 - d[1]
    b_t = (d[2] - d[0]) / 2
    return 16 * eps**4 * (b_t * b_t - 4 * a_t * d[1])


def test_criterion_4_discriminant_identity():
    rng = np.random.default_rng(20240604)
    worst, n = 0.0, 0
    while n < 10_000:
        eps = rng.uniform(1e-3, 1.0)
        lam = rng.uniform(0.0, 0.999) / eps
        alpha = rng.uniform(-10.0, 10.0)
        if not check_condition_i(eps, lam, alpha):
            continue
        lhs, rhs, ok = discriminant_identity_check(alpha, eps, lam)
        exact = _disc_oracle(alpha, eps, lam)
        worst = max(
            worst,
            abs(lhs - rhs) / (1 + abs(rhs)),
            float(abs(Fraction(lhs) - exact) / (1 + abs(exact))),
            float(abs(Fraction(rhs) - exact) / (1 + abs(exact))),
        )
        n += 1
    spot_lhs, spot_rhs, _ = discriminant_identity_check(3.0, 0.1, 2.5)
    ok = (
        worst <= 1e-12
        and abs(spot_lhs - 3.375e-5) <= 1e-12 * (1 + 3.375e-5)
        and abs(spot_rhs - 3.375e-5) <= 1e-12 * (1 + 3.375e-5)
    )
    record_criterion(4, ok, f"n={n} worst_rel={worst:.3g} spot={spot_lhs:.6g}/{spot_rhs:.6g}")
    assert ok


def _oracle_min_eig(alphas, c, eps, lam):
    # the Lyapunov derivative matrix written out independently of the library
    k = 1 - eps * lam
    mats = np.empty((len(alphas), 2, 2))
    mats[:, 0, 0] = 1 - eps * (lam + alphas)
    mats[:, 0, 1] = mats[:, 1, 0] = -0.5 * (c * eps**2 + k * (2 - eps * alphas))
    mats[:, 1, 1] = k * (c * eps**2 + 1)
    return np.linalg.eigvalsh(mats)[:, 0]


def test_criterion_5_positive_definiteness():
    rng = np.random.default_rng(7)
    tuples, failures = 0, 0
    while tuples < 1000:
        eps = 10 ** rng.uniform(-3, 0)
        lam = rng.uniform(0.01, 0.99) / eps
        top = (1 - eps * lam) / eps
        a2 = rng.uniform(-5.0, top)
        a1 = rng.uniform(a2 - 10.0, a2)
        if not check_condition_i(eps, lam, a2):
            continue
        if not check_condition_ii(eps, lam, a1, a2)[0]:
            continue
        tuples += 1
        c = select_c(eps, lam, a1, a2)
        alphas = np.linspace(a1, a2, 1001)
        d1, d2 = lambda_minors(alphas, c, eps, lam)
        minors_ok = bool(np.all(d1 > 0) and np.all(d2 > 0))
        eig_ok = bool(np.all(_oracle_min_eig(alphas, c, eps, lam) > 0))
        if not (minors_ok and eig_ok) or minors_ok != eig_ok:
            failures += 1
    ok = failures == 0
    record_criterion(5, ok, f"tuples={tuples} failures={failures}")
    assert ok


def test_criterion_6_relaxed_boundary():
    bad, zero_err = 0, 0.0
    a2 = np.linspace(-2.0, 2.0, 4001)
    for eps, lam in [(0.1, 2.5), (0.2, 2.5), (0.05, 1.0), (0.2, 0.5)]:
        c2 = root_c2(a2, eps, lam)
        bad += int(np.count_nonzero((c2 >= 0) != (a2 <= 0)))
        zero_err = max(zero_err, abs(float(root_c2(0.0, eps, lam))))
    ok = bad == 0 and zero_err <= 1e-12
    record_criterion(6, ok, f"sign_mismatches={bad} |c2(0)|={zero_err:.3g}")
    assert ok


def test_criterion_7_nussbaum_scanner():
    n2 = nussbaum_scan(BUILTIN_GAINS["z2_cos_z"], 200 * math.pi, 20000)
    n1 = nussbaum_scan(BUILTIN_GAINS["z_cos_z"], 200 * math.pi, 20000)
    z = n1.z_grid
    oracle1 = np.sin(z) + (np.cos(z) - 1) / z
    oracle2 = z * np.sin(z) + 2 * np.cos(z) - 2 * np.sin(z) / z
    err1 = float(np.max(np.abs(n1.averages - oracle1)))
    err2 = float(np.max(np.abs(n2.averages - oracle2)))
    ok = (
        n2.sup_avg > 10 and n2.inf_avg < -10
        and max(abs(n1.sup_avg), abs(n1.inf_avg)) <= 3
        and err1 <= 1e-6 and err2 <= 1e-6
    )
    record_criterion(7, ok, f"z2cos sup/inf={n2.sup_avg:.1f}/{n2.inf_avg:.1f} zcos max|avg|="
                            f"{max(abs(n1.sup_avg), abs(n1.inf_avg)):.3f} oracle_err={max(err1, err2):.2g}")
    assert ok


def test_criterion_8_unperturbed_z_bound(runs):
    tr, _, _ = runs["unperturbed_sector"]
    s = tr.scenario
    kp = k_prime(s.controller.gain, s.plant.b, s.plant.f.alpha1, s.plant.f.alpha2, s.controller.lam, s.y0)
    expected_kp = max(1, math.ceil(16 / (4 * math.pi)))
    bound = zk(kp, s.plant.b)
    zmax = float(tr.z.max())
    dot_ok, crossings = z_dot_bound_check(tr, s.controller, s.plant)
    ok = kp == expected_kp == 2 and bool(np.all(tr.z <= bound)) and dot_ok and not tr.diverged
    record_criterion(8, ok, f"k'={kp} z_k'={bound:.4f} max z={zmax:.4f} zdot_crossings={len(crossings)}")
    assert ok


def test_criterion_9_numerical_hygiene(runs, preset):
    halving_bad = []
    for name, (tr, o, _) in runs.items():
        if o.verdict == "diverged":
            continue
        end = np.linalg.norm(tr.end_state())
        if not (tr.accepted and tr.halving_error <= 1e-6 * (1 + end)):
            halving_bad.append(name)
    worst = 0.0
    for name in FIG_ALL:
        a = runs[name][0]
        b = simulate(preset(name).negated())
        if len(a.t) != len(b.t) or a.trip_reason != b.trip_reason:
            worst = math.inf
            break
        for u, v in ((a.x, -b.x), (a.y, -b.y), (a.w, b.w)):
            worst = max(worst, float(np.max(np.abs(u - v) / (1 + np.abs(u)))))
    ok = not halving_bad and worst <= 1e-12
    record_criterion(9, ok, f"halving_failures={halving_bad} sign_flip_worst_rel={worst:.3g}")
    assert ok
