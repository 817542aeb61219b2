import numpy as np
import pytest

from boundary_currents.holofunc import (constant, dilate_disc, growth_order_estimate, inv_pole, inv_sum,
                                        monomial, tensor, translate, zbar_perturbed)


def test_translate_examples():
    g = translate(monomial(1), [1], 0.1)
    assert complex(g(np.array(0.5))) == pytest.approx(0.4)
    g = translate(inv_pole(1, 1), [1], 0.1)
    assert complex(g(np.array(1.0))) == pytest.approx(10.0)
    f = tensor([inv_pole(1, 1), inv_pole(1, 1)])
    g = translate(f, [1, 1], 0.5)
    assert complex(g(np.array(1.0), np.array(1.0))) == pytest.approx(4.0)
    assert g.declared_growth_order == f.declared_growth_order


def test_translate_converges_first_order():
    f = inv_pole(1, 2)
    z = np.array(0.3 + 0.2j)
    errs = [abs(complex(translate(f, [1], e)(z) - f(z))) for e in (0.01, 0.005, 0.0025)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.05)


def test_translate_tensor_acts_per_factor():
    f = tensor([inv_pole(1, 1), inv_pole(1, 2)])
    g = translate(f, [0.3, 0], 1.0)
    z, w = np.array(0.1 + 0.1j), np.array(-0.2j)
    assert complex(g(z, w)) == complex(g.tensor_factors[0](z) * f.tensor_factors[1](w))


def test_dilate_examples(disc):
    assert complex(dilate_disc(monomial(2), 0.5, disc)(np.array(1.0))) == pytest.approx(0.25)
    assert complex(dilate_disc(inv_pole(1, 1), 0.9, disc)(np.array(1.0))) == pytest.approx(10.0)
    assert complex(dilate_disc(constant(1), 0.3, disc)(np.array(0.7j))) == 1


def test_dilate_rejects_ellipse(disc_ellipse):
    with pytest.raises(ValueError):
        dilate_disc(constant(1, 2), 0.5, disc_ellipse)


def test_tensor_examples(bidisc):
    f = tensor([inv_pole(1, 1), inv_pole(1, 1)], bidisc)
    assert complex(f(np.array(0j), np.array(0j))) == 1
    one = tensor([constant(1), constant(1)])
    assert one.declared_growth_order == 0
    assert tensor([inv_pole(1, 2), constant(1)]).declared_growth_order == 2
    assert f.check_tensor(bidisc) < 1e-12
    with pytest.raises(ValueError):
        tensor([inv_pole(1, 1)], bidisc)


@pytest.mark.parametrize("f", [constant(1), monomial(3), inv_pole(1, 1), inv_pole(1, 3)])
def test_holomorphy_residual(f, disc):
    assert f.check_holomorphic(disc) < 1e-6


def test_holomorphy_residual_two_variables(bidisc):
    assert inv_sum(2, 2).check_holomorphic(bidisc) < 1e-6
    assert zbar_perturbed(inv_sum(2, 2)).check_holomorphic(bidisc) > 1e-3


@pytest.mark.parametrize("f, order", [(constant(1), 0.0), (inv_pole(1, 1), 1.0), (inv_pole(1, 2), 2.0)])
def test_growth_examples(f, order, disc):
    assert growth_order_estimate(f, disc) == pytest.approx(order, abs=0.2)


def test_growth_of_tensor_is_subadditive(disc, bidisc):
    a, b = inv_pole(1, 1), inv_pole(1, 2)
    est = growth_order_estimate(tensor([a, b]), bidisc)
    assert est <= growth_order_estimate(a, disc) + growth_order_estimate(b, disc) + 0.5


def test_call_arity():
    with pytest.raises(ValueError):
        inv_sum(2, 2)(np.array(0.1))


def test_inv_sum_shell_supremum(bidisc):
    # Re(2 - z - w) >= (1 - |z|) + (1 - |w|) >= 2 delta on the shell, with equality at z = w = 1 - delta
    f = inv_sum(2, 2)
    for delta in (1e-1, 1e-2, 1e-3):
        z = np.array(1 - delta + 0j)
        assert abs(complex(f(z, z))) == pytest.approx(1 / (2 * delta))
    assert growth_order_estimate(f, bidisc) == pytest.approx(1.0, abs=0.05)
