import numpy as np
import pytest

from thetanull.characteristics import (
    Characteristic,
    enumerate_characteristics,
    sign,
    two_torsion_point,
)
from thetanull.errors import GenusTooLarge, ParseError
from thetanull.siegel import random_siegel, validate_period_matrix
from thetanull.theta import eval_theta


def test_sign_examples():
    assert sign(Characteristic.zero(5)) == 1
    assert sign(Characteristic.parse("10010/10110")) == 1
    assert sign(Characteristic((1,), (1,))) == -1


def test_parse_roundtrip():
    m = Characteristic.parse("10010/10110")
    assert m.epsilon == (1, 0, 0, 1, 0)
    assert m.delta == (1, 0, 1, 1, 0)
    assert str(m) == "10010/10110"


@pytest.mark.parametrize("text", ["1001/10110", "10210/10110", "10010", "", "a/b"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        Characteristic.parse(text)


def test_genus1_even_list():
    assert enumerate_characteristics(1, "even") == [
        Characteristic((0,), (0,)),
        Characteristic((0,), (1,)),
        Characteristic((1,), (0,)),
    ]


@pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
def test_counts(g):
    even = enumerate_characteristics(g, "even")
    odd = enumerate_characteristics(g, "odd")
    assert len(even) == 2 ** (g - 1) * (2**g + 1)
    assert len(odd) == 2 ** (g - 1) * (2**g - 1)
    assert len(even) + len(odd) == 4**g


def test_specific_counts():
    assert len(enumerate_characteristics(5, "even")) == 528
    assert len(enumerate_characteristics(4, "odd")) == 120


def test_order_and_uniqueness():
    chars = enumerate_characteristics(3)
    keys = [m.epsilon + m.delta for m in chars]
    assert keys == sorted(keys)
    assert len(set(chars)) == len(chars)


def test_genus_cap():
    with pytest.raises(GenusTooLarge):
        enumerate_characteristics(9)


def test_two_torsion_points():
    assert np.array_equal(two_torsion_point(Characteristic.zero(2), random_siegel(2, 0)), [0, 0])
    tau1 = validate_period_matrix([[1j]])
    np.testing.assert_allclose(two_torsion_point(Characteristic((1,), (1,)), tau1), [(1 + 1j) / 2])
    tau2 = validate_period_matrix(1j * np.eye(2))
    z = two_torsion_point(Characteristic.parse("10/01"), tau2)
    np.testing.assert_allclose(z, [0.5j, 0.5])


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_odd_two_torsion_points_on_theta_divisor(g):
    zero = Characteristic.zero(g)
    for seed in range(2):
        tau = random_siegel(g, seed=100 + seed)
        for m in enumerate_characteristics(g, "odd"):
            ev = eval_theta(zero, two_torsion_point(m, tau), tau)
            assert abs(ev.value) <= ev.error_bound + 1e-10
