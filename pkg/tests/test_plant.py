import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlpi.plant import (
    PlantConfig,
    SectorNonlinearity,
    eval_f,
    get_nonlinearity,
    linear,
    plant_rates,
    sin2_sector,
    verify_sector,
    zero_map,
)

SECTOR = get_nonlinearity("sector_sin2")


def test_sector_example_values():
    assert eval_f(SECTOR, 0.0) == 0.0
    assert eval_f(SECTOR, math.pi / 2) == pytest.approx(3 * math.pi)
    assert eval_f(SECTOR, 1.0) == pytest.approx(3.0 * (1.0 + math.sin(1.0) ** 2))
    assert (SECTOR.alpha1, SECTOR.alpha2) == (3.0, 6.0)


def test_verify_sector_passes_on_sin2_plant():
    ok, margin = verify_sector(SECTOR, -10.0, 10.0, 10001)
    assert ok
    # ratio touches alpha1 = 3 near x = 0 and at multiples of pi
    assert 0.0 <= margin <= 1e-4


def test_verify_sector_rejects_quadratic():
    quad = SectorNonlinearity(lambda x: x * x, 0.0, 0.5, name="x2")
    ok, margin = verify_sector(quad, 0.0, 1.0, 101)
    assert not ok
    assert margin == pytest.approx(-0.5)


def test_verify_sector_zero_map():
    assert verify_sector(zero_map(), -5.0, 5.0, 11) == (True, 0.0)


def test_verify_sector_input_validation():
    with pytest.raises(ValueError):
        verify_sector(SECTOR, 1.0, 1.0, 10)
    with pytest.raises(ValueError):
        verify_sector(SECTOR, 0.0, 1.0, 1)


def test_sector_bounds_order_enforced():
    with pytest.raises(ValueError):
        SectorNonlinearity(lambda x: x, 2.0, 1.0)
    s = sin2_sector(1.0, -3.0)
    assert (s.alpha1, s.alpha2) == (-2.0, 1.0)


def test_get_nonlinearity_forms():
    assert get_nonlinearity("zero").coeffs == (0.0, 0.0)
    assert get_nonlinearity({"id": "linear", "alpha": 2}).alpha2 == 2.0
    s = get_nonlinearity({"id": "sin2", "a": 1, "c": 1, "alpha2": 3})
    assert (s.alpha1, s.alpha2) == (1.0, 3.0)
    with pytest.raises(ValueError):
        get_nonlinearity("cubic")
    with pytest.raises(TypeError):
        get_nonlinearity(3.0)


def test_plant_rates_examples():
    pls = PlantConfig("perturbed", linear(1.0), 0.5, 0.25)
    assert plant_rates(pls, 0.0, 0.0, 0.0) == (0.0, 0.0)
    dx, dy = plant_rates(pls, 5.0, 1.0, 0.0)
    assert (dx, dy) == (5.0, 16.0)
    unp = PlantConfig("unperturbed", SECTOR, 1.0)
    assert plant_rates(unp, 0.0, 0.0, 0.0) == (0.0, 0.0)
    assert plant_rates(unp, 123.0, 1.0, 2.0) == (0.0, pytest.approx(3 * (1 + math.sin(1) ** 2) + 2.0))


def test_plant_config_validation():
    with pytest.raises(ValueError):
        PlantConfig("perturbed", SECTOR, 0.0, 0.1)
    with pytest.raises(ValueError):
        PlantConfig("perturbed", SECTOR, 1.0, 0.0)
    with pytest.raises(ValueError):
        PlantConfig("delayed", SECTOR, 1.0, 0.1)
    assert PlantConfig("perturbed", SECTOR, 1.0, 0.1).M == pytest.approx(10.0)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50),
    st.floats(-5, 5), st.floats(0.01, 2.0),
)
def test_origin_is_only_zero_input_equilibrium_of_filter(x, y, u, a, eps):
    p = PlantConfig("perturbed", sin2_sector(a, 1.0), 0.7, eps)
    dx, dy = plant_rates(p, x, y, u)
    # filter equation is exactly M (x - y)
    assert dy == pytest.approx((x - y) / eps, rel=1e-12, abs=1e-12)
    assert plant_rates(p, 0.0, 0.0, 0.0) == (0.0, 0.0)


def test_sector_map_is_locally_lipschitz():
    xs = np.linspace(-20, 20, 40001)
    fx = SECTOR(xs)
    slopes = np.abs(np.diff(fx) / np.diff(xs))
    # |f'| <= 6 + 3|x| on [-20, 20]
    assert np.all(slopes <= 6 + 3 * np.abs(xs[1:]) + 3 * 1e-3 + 1e-9)
