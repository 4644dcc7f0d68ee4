import os

import pytest

import weierkern


@pytest.fixture(scope="module")
def curve():
    fixture_dir = os.environ.get("WEIERKERN_FIXTURE_DIR", ".")
    return weierkern.load_curve(os.path.join(fixture_dir, "fixture.json"))


def test_genus_formula():
    assert weierkern.genus_complete_intersection(3, 2) == 4


def test_curve_degrees(curve):
    assert curve.genus() == 4
    assert (curve.deg_f(), curve.deg_g()) == (3, 2)


def test_fiber_count(curve):
    points = curve.fiber(-1.0)
    assert len(points) == 6
    for p in points:
        assert curve.residual(p) < 1e-10


def test_kernel_hand_value(curve):
    x = (2.0, -2.0, -1.0)
    y = (-1.0, -1.0, 1.0)
    expected = 2.0 / 21.0
    for variant in ("compact", "g4"):
        value = curve.kernel(variant, x, y)
        assert abs(value - expected) < 1e-12


def test_full_coincidence_raises(curve):
    y = (-1.0, -1.0, 1.0)
    with pytest.raises(weierkern.WeierkernError):
        curve.kernel("compact", y, y)
