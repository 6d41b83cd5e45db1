import math

import pytest

from nlpi.quadrature import QuadratureError, adaptive_simpson


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (math.sin, 0.0, math.pi, 2.0),
        (lambda s: s**3, -1.0, 2.0, 3.75),
        (math.exp, 0.0, 1.0, math.e - 1.0),
        (lambda s: 1.0 / (1.0 + s * s), 0.0, 1.0, math.pi / 4),
    ],
)
def test_known_integrals(f, a, b, exact):
    assert adaptive_simpson(f, a, b) == pytest.approx(exact, rel=1e-10, abs=1e-12)


def test_reversed_and_empty_interval():
    assert adaptive_simpson(math.cos, 0.0, 0.0) == 0.0
    fwd = adaptive_simpson(math.cos, 0.0, 3.0)
    assert adaptive_simpson(math.cos, 3.0, 0.0) == pytest.approx(-fwd, rel=1e-14)


def test_singular_integrand_raises():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda s: 1.0 / s if s else 0.0, -1.0, 1.0, max_depth=20)
