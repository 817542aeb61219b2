import numpy as np
import pytest

from boundary_currents.extrapolation import richardson, richardson_table


def ladder(fn, h0=0.1, n=6):
    h = h0 * 2.0 ** -np.arange(n)
    return [(x, fn(x)) for x in h]


def test_linear_is_exact():
    v, err = richardson(ladder(lambda h: 3 + 2 * h))
    assert v == pytest.approx(3.0, abs=1e-14)


def test_quadratic():
    v, _ = richardson(ladder(lambda h: 1 + h + h * h))
    assert abs(v - 1) < 1e-12


def test_cosine():
    v, _ = richardson(ladder(np.cos))
    assert abs(v - 1) < 1e-10


def test_order_hint_two():
    v, _ = richardson(ladder(lambda h: 2 - h * h + h ** 3, n=4), order_hint=2)
    assert abs(v - 2) < 1e-12


def test_error_is_last_correction():
    res = richardson_table(0.1 * 2.0 ** -np.arange(5), [1 + 0.1 * 2.0 ** -j + np.sin(j) * 1e-6 for j in range(5)])
    assert res.error == pytest.approx(res.corrections[-1])
    assert res.error > 0


def test_noisy_ladder_not_converged():
    vals = [1.0, 1.5, 0.7, 2.0, 0.2]
    res = richardson_table(0.1 * 2.0 ** -np.arange(5), vals)
    assert not res.converged


def test_vector_values():
    h = 0.1 * 2.0 ** -np.arange(5)
    V = np.stack([3 + 2 * h, 1 - h], axis=1)
    res = richardson_table(h, V)
    assert np.allclose(res.value, [3, 1], atol=1e-13)


@pytest.mark.parametrize("h", [[0.1, 0.05], [0.1, 0.2, 0.05], [0.1, 0.05, 0.02]])
def test_bad_ladders(h):
    with pytest.raises(ValueError):
        richardson_table(h, np.ones(len(h)))
