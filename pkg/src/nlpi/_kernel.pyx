# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-step RK4 for the closed loop (plant + NG / nonlinear PI).

Mirrors ``nlpi._pykernel.integrate`` operation for operation.
"""

from libc.math cimport cos, sin, fabs, isfinite


cdef struct Loop:
    bint perturbed
    bint ng
    bint trig_sin
    double fa, fc, b, M, lam
    int npoly
    double* poly


cdef inline double _gain(const Loop* L, double z) nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(L.npoly - 1, -1, -1):
        acc = acc * z + L.poly[i]
    if L.trig_sin:
        return acc * sin(z)
    return acc * cos(z)


cdef inline void _rhs(const Loop* L, double x, double y, double w,
                      double* dx, double* dy, double* dw) nogil:
    cdef double u, z, s
    if L.ng:
        u = w * w * cos(w) * y
    else:
        z = 0.5 * y * y + L.lam * w
        u = _gain(L, z) * y
    if L.perturbed:
        s = sin(x)
        dx[0] = (L.fa + L.fc * s * s) * x + L.b * u
        dy[0] = L.M * (x - y)
    else:
        s = sin(y)
        dx[0] = 0.0
        dy[0] = (L.fa + L.fc * s * s) * y + L.b * u
    dw[0] = y * y


def integrate(bint perturbed, double fa, double fc, double b, double M,
              bint ng, double lam, double[::1] poly, bint trig_sin,
              double x0, double y0, double w0, double dt, long n_steps,
              long stride, double guard, double[:, ::1] out):
    """Integrate and record every ``stride``-th state into ``out``.

    Returns ``(rows, trip_time, reason)``; reason is 0 (finished),
    1 (magnitude guard) or 2 (non-finite state).  On a trip the offending
    state is written as the last row.
    """
    cdef Loop L
    L.perturbed = perturbed
    L.ng = ng
    L.trig_sin = trig_sin
    L.fa = fa
    L.fc = fc
    L.b = b
    L.M = M
    L.lam = lam
    L.npoly = poly.shape[0]
    L.poly = &poly[0] if L.npoly > 0 else NULL

    cdef double x = x0, y = y0, w = w0
    cdef double k1x, k1y, k1w, k2x, k2y, k2w, k3x, k3y, k3w, k4x, k4y, k4w
    cdef double hdt = 0.5 * dt, h6 = dt / 6.0
    cdef long i, row = 0
    cdef int reason = 0
    cdef double trip_time = -1.0

    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = w
    row = 1
    with nogil:
        for i in range(1, n_steps + 1):
            _rhs(&L, x, y, w, &k1x, &k1y, &k1w)
            _rhs(&L, x + hdt * k1x, y + hdt * k1y, w + hdt * k1w, &k2x, &k2y, &k2w)
            _rhs(&L, x + hdt * k2x, y + hdt * k2y, w + hdt * k2w, &k3x, &k3y, &k3w)
            _rhs(&L, x + dt * k3x, y + dt * k3y, w + dt * k3w, &k4x, &k4y, &k4w)
            x = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            y = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            w = w + h6 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            if not (isfinite(x) and isfinite(y) and isfinite(w)):
                reason = 2
            elif fabs(x) > guard or fabs(y) > guard or fabs(w) > guard:
                reason = 1
            if reason != 0:
                trip_time = i * dt
                out[row, 0] = x
                out[row, 1] = y
                out[row, 2] = w
                row += 1
                break
            if i % stride == 0:
                out[row, 0] = x
                out[row, 1] = y
                out[row, 2] = w
                row += 1
    return row, trip_time, reason
