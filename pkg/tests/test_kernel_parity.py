import numpy as np
import pytest

from nlpi import _backend, _pykernel
from nlpi.sim import simulate

compiled, kind = _backend.load(prefer_compiled=True)
needs_ext = pytest.mark.skipif(kind != "compiled", reason="compiled kernel not built")


@needs_ext
@pytest.mark.parametrize("name", ["fig2_sector", "fig1_pint_ng", "fig1_pls_npin", "unperturbed_sector"])
def test_compiled_matches_python_kernel(preset, name):
    s = preset(name, t_end=2.0)
    a = simulate(s, halving=False, integrate=compiled)
    b = simulate(s, halving=False, integrate=_pykernel.integrate)
    assert a.trip_reason == b.trip_reason
    for u, v in ((a.x, b.x), (a.y, b.y), (a.w, b.w)):
        assert np.all(np.abs(u - v) <= 1e-12 * (1 + np.abs(v)))


@needs_ext
def test_guard_trip_identical(preset):
    s = preset("fig1_pint_ng")
    a = simulate(s, integrate=compiled)
    b = simulate(s, integrate=_pykernel.integrate)
    assert a.trip_reason == b.trip_reason == "guard"
    assert a.trip_time == pytest.approx(b.trip_time, rel=1e-12)


def test_fallback_selected_when_compiled_not_preferred():
    fn, name = _backend.load(prefer_compiled=False)
    assert fn is _pykernel.integrate and name == "python"


def test_python_kernel_stride_and_nonfinite():
    out = np.empty((12, 3))
    rows, trip, reason = _pykernel.integrate(
        True, 0.0, 0.0, 1.0, 4.0, False, 1.0, np.array([0.0, 1.0]), False,
        1.0, 1.0, 0.0, 0.01, 100, 10, 1e6, out,
    )
    assert (rows, reason) == (11, 0)
    out = np.empty((5, 3))
    rows, trip, reason = _pykernel.integrate(
        True, 0.0, 0.0, 1.0, 4.0, False, 1.0, np.array([float("inf")]), False,
        1.0, 1.0, 0.0, 0.01, 100, 1, 1e6, np.empty((102, 3)),
    )
    assert reason == 2 and trip == pytest.approx(0.01)
