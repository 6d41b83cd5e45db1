"""Adaptive Simpson quadrature used for gains without a closed-form integral."""

from __future__ import annotations

import math
from collections.abc import Callable

__all__ = ["QuadratureError", "adaptive_simpson"]


class QuadratureError(ArithmeticError):
    """Raised when adaptive refinement does not reach the requested tolerance."""


def _scale(f: Callable[[float], float], a: float, b: float, n: int = 64) -> float:
    # coarse estimate of the integral of |f|, used to turn tol into a relative bound
    h = (b - a) / n
    return h * sum(abs(f(a + (i + 0.5) * h)) for i in range(n))


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 48,
    max_evals: int = 2_000_000,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson + Richardson correction.

    ``tol`` is relative to ``max(1, int |f|)`` over the interval, so the same
    setting works for small and large integrands.

    Raises:
        QuadratureError: if a panel needs more than ``max_depth`` bisections or
            the evaluation budget is exhausted.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth, max_evals)

    total_tol = tol * max(1.0, _scale(f, a, b))
    width = b - a
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    evals = 3
    whole = width / 6.0 * (fa + 4.0 * fm + fb)

    result = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, depth)
    stack = [(a, b, fa, fm, fb, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        evals += 2
        h = hi - lo
        left = h / 12.0 * (flo + 4.0 * flm + fmid)
        right = h / 12.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        local_tol = total_tol * h / width
        if abs(delta) <= 15.0 * local_tol and depth >= 2:
            result += left + right + delta / 15.0
            continue
        if depth >= max_depth or evals > max_evals:
            raise QuadratureError(
                f"adaptive Simpson did not converge on [{lo!r}, {hi!r}] "
                f"(depth={depth}, evals={evals}); the gain looks ill-behaved"
            )
        if not math.isfinite(delta):
            raise QuadratureError(f"non-finite integrand near {mid!r}")
        stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return result
