"""Pure-Python fixed-step RK4 for the closed loop.

Same signature and operation order as the compiled ``_kernel.integrate``;
``integrate_callables`` additionally accepts arbitrary Python f / kappa.
"""

from __future__ import annotations

import math


def _coeff_f(fa, fc):
    sin = math.sin

    def f(x):
        s = sin(x)
        return (fa + fc * s * s) * x

    return f


def _coeff_kappa(poly, trig_sin):
    coeffs = tuple(reversed([float(c) for c in poly]))
    trig = math.sin if trig_sin else math.cos

    def kappa(z):
        acc = 0.0
        for c in coeffs:
            acc = acc * z + c
        return acc * trig(z)

    return kappa


def integrate(perturbed, fa, fc, b, M, ng, lam, poly, trig_sin,
              x0, y0, w0, dt, n_steps, stride, guard, out):
    kappa = None if ng else _coeff_kappa(poly, trig_sin)
    return integrate_callables(
        perturbed, _coeff_f(fa, fc), b, M, ng, lam, kappa,
        x0, y0, w0, dt, n_steps, stride, guard, out,
    )


def integrate_callables(perturbed, f, b, M, ng, lam, kappa,
                        x0, y0, w0, dt, n_steps, stride, guard, out):
    cos = math.cos
    isfinite = math.isfinite

    if ng:
        def control(y, w):
            return w * w * cos(w) * y
    else:
        def control(y, w):
            z = 0.5 * y * y + lam * w
            return float(kappa(z)) * y

    if perturbed:
        def rhs(x, y, w):
            u = control(y, w)
            return float(f(x)) + b * u, M * (x - y), y * y
    else:
        def rhs(x, y, w):
            u = control(y, w)
            return 0.0, float(f(y)) + b * u, y * y

    x, y, w = float(x0), float(y0), float(w0)
    hdt = 0.5 * dt
    h6 = dt / 6.0
    out[0, 0], out[0, 1], out[0, 2] = x, y, w
    row = 1
    for i in range(1, n_steps + 1):
        try:
            k1x, k1y, k1w = rhs(x, y, w)
            k2x, k2y, k2w = rhs(x + hdt * k1x, y + hdt * k1y, w + hdt * k1w)
            k3x, k3y, k3w = rhs(x + hdt * k2x, y + hdt * k2y, w + hdt * k2w)
            k4x, k4y, k4w = rhs(x + dt * k3x, y + dt * k3y, w + dt * k3w)
            x = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            y = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            w = w + h6 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        except (ValueError, OverflowError):
            # math.sin/cos raise on inf where the C kernel yields nan
            x = y = w = math.nan
        reason = 0
        if not (isfinite(x) and isfinite(y) and isfinite(w)):
            reason = 2
        elif abs(x) > guard or abs(y) > guard or abs(w) > guard:
            reason = 1
        if reason:
            out[row, 0], out[row, 1], out[row, 2] = x, y, w
            return row + 1, i * dt, reason
        if i % stride == 0:
            out[row, 0], out[row, 1], out[row, 2] = x, y, w
            row += 1
    return row, -1.0, 0
