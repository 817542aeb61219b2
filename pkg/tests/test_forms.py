import numpy as np
import pytest

from boundary_currents.forms import (BoxBump, Constant, ConjMonomial, Cutoff, DomainCutoff, Product, RadialBump,
                                     TestForm, VectorFieldT, dbar, dbar_factor, make_weinstock_form,
                                     pullback_to_face, sigma_apply, volume_density_factor)
from boundary_currents.geometry import interior_quadrature, unit_disc

rng = np.random.default_rng(7)


def random_points(n, N, spread=1.2):
    return [rng.uniform(-spread, spread, n) + 1j * rng.uniform(-spread, spread, n) for _ in range(N)]


def max_coeff(form, z):
    return max((float(np.max(np.abs(c))) for c in form.coefficients(z).values()), default=0.0)


BUMPS = [BoxBump.around(0.2 + 0.1j, 0.6, 0.4), RadialBump(-0.1 + 0.3j, 0.7), Cutoff(0.1, 0.3, 0.9),
         DomainCutoff(unit_disc(), 0.2)]


def fd_dbar(u, z, h=1e-4):
    """Fourth-order central differences for d/dzbar."""
    def d(e):
        return (8 * (u(z + e) - u(z - e)) - (u(z + 2 * e) - u(z - 2 * e))) / (12 * h)
    return 0.5 * (d(h) + 1j * d(1j * h))


@pytest.mark.parametrize("u", BUMPS)
def test_derivative_oracle_first_order(u):
    z = 0.9 * random_points(200, 1)[0]
    exact = u.derivative(z, 1)
    approx = fd_dbar(u, z)
    scale = np.max(np.abs(exact))
    assert scale > 0
    assert np.max(np.abs(exact - approx)) < 1e-6 * scale


@pytest.mark.parametrize("u", BUMPS)
def test_derivative_oracle_second_order(u):
    z = 0.9 * random_points(200, 1)[0]
    exact = u.derivative(z, 2)
    approx = fd_dbar(lambda x: u.derivative(x, 1), z)
    assert np.max(np.abs(exact - approx)) < 1e-6 * np.max(np.abs(exact))


def test_box_bump_vanishes_on_box_boundary():
    b = BoxBump(-0.3, 0.5, -0.2, 0.4)
    s = np.linspace(0, 1, 101)
    edge = np.concatenate([-0.3 + 0.8 * s - 0.2j, -0.3 + 0.8 * s + 0.4j, -0.3 + 1j * (-0.2 + 0.6 * s),
                           0.5 + 1j * (-0.2 + 0.6 * s)])
    for m in range(4):
        assert np.max(np.abs(b.derivative(edge, m))) < 1e-14


def test_dbar_of_function_is_derivative():
    b = RadialBump(0.1, 0.6)
    form = TestForm.from_tensor([(b, "")])
    d = dbar(form)
    z = random_points(50, 1, 0.8)
    assert list(d.monomials) == [((), (0,))]
    assert np.allclose(d.coefficient((), (0,), z), b.derivative(z[0], 1), rtol=0, atol=1e-14)


@pytest.mark.parametrize("N, pieces", [
    (1, [(RadialBump(0, 0.8), "")]),
    (2, [(RadialBump(0, 0.8), "dz"), (BoxBump.around(0.2, 0.5), "")]),
    (2, [(RadialBump(0, 0.8), ""), (BoxBump.around(0.2, 0.5), "")]),
    (3, [(RadialBump(0, 0.8), "dz"), (BoxBump.around(0.2, 0.5), "dzb"), (Cutoff(0, 0.2, 0.7), "")]),
])
def test_dbar_squared_vanishes(N, pieces):
    form = TestForm.from_tensor(pieces)
    dd = dbar(dbar(form))
    assert max_coeff(dd, random_points(100, N)) < 1e-12


def test_dbar_tensor_two_variables():
    b1, b2 = RadialBump(0.1, 0.7), BoxBump.around(-0.2j, 0.6)
    form = TestForm.from_tensor([(b1, "dz"), (b2, "dz")])
    d = dbar(form)
    z = random_points(100, 2, 0.8)
    # dzbar_k moved past dz ^ dw is an even permutation
    assert np.allclose(d.coefficient((0, 1), (0,), z), b1.derivative(z[0], 1) * b2(z[1]), atol=1e-14)
    assert np.allclose(d.coefficient((0, 1), (1,), z), b1(z[0]) * b2.derivative(z[1], 1), atol=1e-14)


@pytest.mark.parametrize("pieces", [
    [(RadialBump(0, 0.8), "dz"), (BoxBump.around(0.2, 0.5), "dz")],
    [(RadialBump(0, 0.8), "dzdzb"), (BoxBump.around(0.2, 0.5), "dz")],
    [(RadialBump(0, 0.8), "dz"), (BoxBump.around(0.2, 0.5), "dzb"), (Cutoff(0, 0.2, 0.7), "dz")],
])
def test_dbar_is_signed_sum_of_factor_dbars(pieces):
    form = TestForm.from_tensor(pieces)
    N = form.N
    total = TestForm(N)
    for j in range(1, N + 1):
        total = total + sigma_apply(j, dbar_factor(j, form))
    diff = dbar(form) - total
    assert max_coeff(diff, random_points(100, N)) < 1e-12


def test_dbar_factor_of_constant_factor_vanishes():
    form = TestForm.from_tensor([(RadialBump(0, 0.8), "dz"), (Constant(2.0), "dz")])
    d = dbar_factor(2, form)
    assert max_coeff(d, random_points(50, 2)) == 0.0


def test_sigma_signs():
    f1 = TestForm.from_tensor([(RadialBump(0, 0.8), "dz"), (RadialBump(0, 0.8), "dz")])
    f2 = TestForm.from_tensor([(RadialBump(0, 0.8), "dzdzb"), (RadialBump(0, 0.8), "dz")])
    z = random_points(10, 2, 0.5)
    key = ((0, 1), ())
    assert np.allclose(sigma_apply(1, f1).coefficient(*key, z), f1.coefficient(*key, z))
    assert np.allclose(sigma_apply(2, f1).coefficient(*key, z), -f1.coefficient(*key, z))
    k2 = ((0, 1), (0,))
    assert np.allclose(sigma_apply(2, f2).coefficient(*k2, z), f2.coefficient(*k2, z))
    with pytest.raises(ValueError):
        sigma_apply(3, f1)


def test_normal_form_sign():
    b = RadialBump(0, 0.8)
    a = TestForm.monomial(2, (1, 0), (), [b, b])
    c = TestForm.monomial(2, (0, 1), (), [b, b])
    z = random_points(5, 2, 0.3)
    assert np.allclose(a.coefficient((0, 1), (), z), -c.coefficient((0, 1), (), z))
    with pytest.raises(ValueError):
        TestForm(2, {((1, 0), ()): []})


def test_volume_factors():
    assert volume_density_factor(1) == pytest.approx(-2j)
    assert volume_density_factor(2) == pytest.approx(4)
    assert volume_density_factor(3) == pytest.approx(-8j)


def test_weinstock_forms_closed_on_domain(disc, bidisc):
    w = make_weinstock_form(disc, {(2,): 1.0})
    z = [np.exp(1j * rng.uniform(0, 2 * np.pi, 100)) * np.sqrt(rng.uniform(0, 1, 100))]
    assert max_coeff(dbar(w), z) < 1e-12
    assert np.allclose(w.coefficient((0,), (), z), z[0] ** 2)
    w = make_weinstock_form(bidisc, {(1, 1): 1.0})
    zz = [np.exp(1j * rng.uniform(0, 2 * np.pi, 100)) * np.sqrt(rng.uniform(0, 1, 100)) for _ in range(2)]
    zz[0][:10] = np.exp(1j * rng.uniform(0, 2 * np.pi, 10))
    assert w.bidegree == (2, 1)
    assert max_coeff(dbar(w), zz) < 1e-12
    # away from the closed domain the cutoff is not constant
    far = [np.full(5, 0.5 + 0j), np.full(5, 1.15 + 0j)]
    assert max_coeff(dbar(w), far) > 1e-3
    with pytest.raises(ValueError):
        make_weinstock_form(disc, {(1,): 1.0}, cutoff_margin=0.3, holomorphy_margin=0.1)


def test_pullback_of_dz_on_circle(disc):
    chi = DomainCutoff(unit_disc(), 0.2)
    face = pullback_to_face(TestForm.from_tensor([(chi * ConjMonomial(1), "dz")]), disc, 1)
    t = np.linspace(0, 2 * np.pi, 17)
    assert np.allclose(face.angular_density(t), 1j * np.exp(1j * t) * np.exp(-1j * t))
    assert pullback_to_face(TestForm.from_tensor([(chi, "dzdzb")]), disc, 1).is_zero


def test_pullback_two_variables(bidisc):
    chi = DomainCutoff(unit_disc(), 0.2)
    g = RadialBump(0.2, 0.5)
    face = pullback_to_face(TestForm.from_tensor([(Product((chi, ConjMonomial(2))), "dz"), (g, "dz")]), bidisc, 1)
    (key, terms), = face.monomials.items()
    assert key == (True, (1,), ())
    t = np.linspace(0, 2 * np.pi, 9)
    assert np.allclose(terms[0].angular(t), 1j * np.exp(-1j * t))
    assert terms[0].slots[1][0] is g
    far = TestForm.from_tensor([(RadialBump(3.0, 0.5), "dz"), (g, "dz")])
    face = pullback_to_face(far, bidisc, 1)
    assert np.allclose(face.monomials[(True, (1,), ())][0].angular(t), 0)


def test_transversal_field():
    T = VectorFieldT(unit_disc())
    assert T.check() < 1e-10


def test_transpose_property():
    d = unit_disc()
    T = VectorFieldT(d)
    u = BoxBump.around(0.75 + 0.1j, 0.15)
    v = RadialBump(0.7 + 0.2j, 0.2)
    rule = interior_quadrature(d, 6)
    z = rule.nodes
    Tu = T.apply(u.jet(z, 1), z).c[0]
    Tsv = T.apply_transpose(v.jet(z, 1), z, 1).c[0]
    lhs = np.sum(rule.weights * Tu * v(z))
    rhs = np.sum(rule.weights * u(z) * Tsv)
    assert abs(lhs) > 1e-3
    assert abs(lhs - rhs) < 1e-8
