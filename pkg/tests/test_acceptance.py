"""
Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest -v tests/test_acceptance.py``; the lines are collected in
the terminal summary.  ``python3 tests/test_acceptance.py`` runs the same
criteria without pytest.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from boundary_currents.forms import (BoxBump, ConjMonomial, Cutoff, DomainCutoff, Product, RadialBump, TestForm,
                                     dbar, dbar_factor, sigma_apply)
from boundary_currents.geometry import ProductDomain, ellipse, unit_disc
from boundary_currents.holofunc import (constant, growth_order_estimate, inv_pole, inv_sum, monomial, tensor,
                                        zbar_perturbed)
from boundary_currents.pairing import (DEFAULT, bc_pair, ce_pair_ibp, ce_pair_limit, default_s, silov_pair)
from boundary_currents.verify import (_outside, _rel, _straddle, check_canonicality, check_edge,
                                      check_facewise, check_reconstruction, check_weinstock)

RESULTS = {}

DISC = ProductDomain([unit_disc()])
BIDISC = ProductDomain([unit_disc(), unit_disc()])
DISC_ELLIPSE = ProductDomain([unit_disc(), ellipse(1.0, 0.6)])

DISC_FAMILY = [constant(1), monomial(3), inv_pole(1, 1), inv_pole(1, 2)]
BUMPS = [RadialBump(0, 0.5), BoxBump.around(0.9, 0.3), BoxBump.around(0.6 + 0.6j, 0.5, 0.4),
         RadialBump(1.0, 0.4), BoxBump.around(-0.7 + 0.5j, 0.4, 0.3)]


def tensor_pole():
    return tensor([inv_pole(1, 1), inv_pole(1, 1)])


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def worst_of(reports):
    return max(r.worst for r in reports)


def failing_cases(reports):
    return [f"{r.name}/{lab}: {res:.3g} > {tol:.3g}" for r in reports for lab, res, tol in r.residuals
            if res > tol]


def test_criterion_01_route_agreement():
    t0 = time.perf_counter()
    worst = 0.0
    for f in DISC_FAMILY:
        for b in BUMPS:
            phi = TestForm.volume([b])
            a = ce_pair_limit(f, phi, DISC).value
            c = ce_pair_ibp(f, phi, DISC).value
            worst = max(worst, abs(a - c) / (1e-4 * (1 + abs(c))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1 and elapsed < 60
    assert report(1, ok, f"limit vs ibp, worst residual/tol {worst:.3g}, {elapsed:.1f}s (< 60s)")


def test_criterion_02_s_and_v_independence():
    worst_s = worst_v = 0.0
    for f in DISC_FAMILY:
        s0 = default_s(f, DISC)[0][0]
        for b in BUMPS:
            phi = TestForm.volume([b])
            a = ce_pair_ibp(f, phi, DISC, s=s0).value
            c = ce_pair_ibp(f, phi, DISC, s=s0 + 1).value
            worst_s = max(worst_s, _rel(a, c) / 1e-6)
            p4 = ce_pair_limit(f, phi, DISC).value
            p6 = ce_pair_limit(f, phi, DISC, cfg=replace(DEFAULT, patches=6)).value
            worst_v = max(worst_v, _rel(p4, p6) / 1e-4)
    ok = worst_s <= 1 and worst_v <= 1
    assert report(2, ok, f"s vs s+1 worst/tol {worst_s:.3g}; 4 vs 6 patches worst/tol {worst_v:.3g}")


def test_criterion_03_extension_by_zero():
    cases = [(f, DISC) for f in DISC_FAMILY + [inv_pole(1, 3)]]
    cases += [(tensor_pole(), BIDISC), (inv_sum(2, 2), BIDISC), (tensor_pole(), DISC_ELLIPSE),
              (inv_sum(2, 2), DISC_ELLIPSE)]
    worst = 0.0
    for f, dom in cases:
        for k in range(dom.N):
            bumps = [_outside(d) if j == k else _straddle(d, 0.0) for j, d in enumerate(dom)]
            phi = TestForm.volume(bumps)  # sup of the density is 1
            for route in (ce_pair_ibp, ce_pair_limit):
                worst = max(worst, abs(route(f, phi, dom).value) / 1e-8)
    assert report(3, worst <= 1, f"{len(cases)} (f, domain) pairs, both routes, worst |value|/tol {worst:.3g}")


def test_criterion_04_weinstock():
    grid = [(f, DISC) for f in [constant(1), monomial(3), inv_pole(1, 1), inv_pole(1, 2), inv_pole(1, 3)]]
    grid += [(tensor_pole(), BIDISC), (inv_sum(2, 2), BIDISC), (tensor_pole(), DISC_ELLIPSE)]
    reps = [check_weinstock(f, dom, count=10) for f, dom in grid]
    controls = [check_weinstock(zbar_perturbed(f, 1e-2), dom, count=10)
                for f, dom in [(inv_pole(1, 1), DISC), (inv_sum(2, 2), BIDISC)]]
    ok_main = all(r.passed for r in reps)
    least = min(res for r in controls for _, res, _ in r.residuals)
    ok_ctrl = all(not r.passed for r in controls) and least > 1e-3
    detail = (f"{len(grid)} (f, domain) pairs x 10 forms, worst residual/tol {worst_of(reps):.3g}; "
              f"perturbed controls fail with least residual {least:.3g} (> 1e-3)")
    assert report(4, ok_main and ok_ctrl, detail), failing_cases(reps)


def test_criterion_05_known_values():
    chi = DomainCutoff(unit_disc(), 0.2)
    psi = TestForm.from_tensor([(Product((chi, ConjMonomial(1))), "dz")])
    worst = 0.0
    for f in (constant(1), inv_pole(1, 1)):
        for route in ("dbar-of-ce", "boundary-limit"):
            worst = max(worst, abs(bc_pair(f, psi, DISC, route=route).value - 2j * np.pi))
    assert report(5, worst < 1e-5, f"<bc f, chi zbar dz> = 2 pi i for f = 1, 1/(1-z), both routes, "
                                   f"worst error {worst:.3g}")


def test_criterion_06_facewise():
    t0 = time.perf_counter()
    reps = [check_facewise(f, BIDISC) for f in (tensor_pole(), inv_sum(2, 2))]
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in reps) and elapsed < 120
    assert report(6, ok, f"bidisc tensor and 1/(2-z-w), worst residual/tol {worst_of(reps):.3g}, "
                         f"{elapsed:.1f}s (< 120s)"), failing_cases(reps)


def test_criterion_07_canonicality():
    reps = [check_canonicality(f, BIDISC, k=k) for f in (tensor_pole(), inv_sum(2, 2)) for k in (1, 2)]
    ok = all(r.passed for r in reps) and all(len(r.residuals) == 9 for r in reps)
    assert report(7, ok, f"3x3 grid on both faces, tensor and 1/(2-z-w), worst residual/tol "
                         f"{worst_of(reps):.3g}"), failing_cases(reps)


def test_criterion_08_edge_and_face_holomorphy():
    reps = [check_edge(tensor_pole(), BIDISC, tol=1e-4), check_edge(inv_sum(2, 2), BIDISC, tol=1e-3)]
    ok = all(r.passed for r in reps)
    assert report(8, ok, f"edge relation and face holomorphy on the bidisc, worst residual/tol "
                         f"{worst_of(reps):.3g}"), failing_cases(reps)


def test_criterion_09_reconstruction():
    reps = [check_reconstruction(f, DISC) for f in (constant(2.0), inv_pole(1, 1), inv_pole(1, 2))]
    reps += [check_reconstruction(f, BIDISC) for f in (inv_sum(2, 2), tensor_pole())]
    ok = all(r.passed for r in reps)
    assert report(9, ok, f"disc and bidisc grids with margin 0.2 incl. cross-face consistency, "
                         f"worst residual/tol {worst_of(reps):.3g}"), failing_cases(reps)


def test_criterion_10_silov():
    d = unit_disc()
    chi = DomainCutoff(d, 0.2)
    cz = Product((chi, ConjMonomial(1)))
    f1, f2 = inv_pole(1, 1), inv_pole(1, 2)
    f = tensor([f1, f2])
    worst = 0.0
    for t0 in (0.0, 2.0):
        bs = [_straddle(d, t0), _straddle(d, t0 + 0.5)]
        v = silov_pair(f, TestForm.from_tensor([(bs[0], "dz"), (bs[1], "dz")]), BIDISC).value
        prod = np.prod([bc_pair(g, TestForm.from_tensor([(b, "dz")]), DISC).value for g, b in zip((f1, f2), bs)])
        worst = max(worst, _rel(v, prod) / 1e-4)
    v = silov_pair(tensor_pole(), TestForm.from_tensor([(cz, "dz"), (cz, "dz")]), BIDISC).value
    err = abs(v + 4 * np.pi ** 2)
    ok = worst <= 1 and err < 1e-4
    assert report(10, ok, f"torus vs product of 1-D pairings worst/tol {worst:.3g}; "
                          f"-4 pi^2 case error {err:.3g}")


def _points(rng, n, N, spread=1.2):
    return [rng.uniform(-spread, spread, n) + 1j * rng.uniform(-spread, spread, n) for _ in range(N)]


def _max_coeff(form, z):
    return max((float(np.max(np.abs(c))) for c in form.coefficients(z).values()), default=0.0)


def test_criterion_11_form_calculus():
    rng = np.random.default_rng(0)
    forms = [TestForm.from_tensor([(RadialBump(0, 0.8), "dz"), (BoxBump.around(0.2, 0.5), "")]),
             TestForm.from_tensor([(RadialBump(0, 0.8), "dzdzb"), (BoxBump.around(0.2, 0.5), "dz")]),
             TestForm.from_tensor([(RadialBump(0, 0.8), "dz"), (BoxBump.around(0.2, 0.5), "dzb"),
                                   (Cutoff(0, 0.2, 0.7), "dz")])]
    sq = split = 0.0
    for form in forms:
        z = _points(rng, 100, form.N)
        sq = max(sq, _max_coeff(dbar(dbar(form)), z))
        total = TestForm(form.N)
        for j in range(1, form.N + 1):
            total = total + sigma_apply(j, dbar_factor(j, form))
        split = max(split, _max_coeff(dbar(form) - total, z))
    fd = 0.0
    h = 1e-4
    for u in (BoxBump.around(0.2 + 0.1j, 0.6, 0.4), RadialBump(-0.1 + 0.3j, 0.7), Cutoff(0.1, 0.3, 0.9),
              DomainCutoff(unit_disc(), 0.2)):
        z = 0.9 * _points(rng, 200, 1)[0]
        for m in (1, 2):
            g = u if m == 1 else (lambda x, u=u: u.derivative(x, 1))

            def d(e):
                return (8 * (g(z + e) - g(z - e)) - (g(z + 2 * e) - g(z - 2 * e))) / (12 * h)
            approx = 0.5 * (d(h) + 1j * d(1j * h))
            exact = u.derivative(z, m)
            fd = max(fd, float(np.max(np.abs(exact - approx)) / np.max(np.abs(exact))))
    ok = sq < 1e-12 and split < 1e-12 and fd < 1e-6
    assert report(11, ok, f"dbar^2 {sq:.3g}, dbar - sum sigma_j dbar_j {split:.3g} (< 1e-12); "
                          f"derivative oracles vs finite differences {fd:.3g} (< 1e-6)")


def test_criterion_12_growth_estimation():
    cases = [("1", constant(1), DISC, 0), ("z^3", monomial(3), DISC, 0), ("1/(1-z)", inv_pole(1, 1), DISC, 1),
             ("1/(1-z)^2", inv_pole(1, 2), DISC, 2), ("1/(2-z-w)", inv_sum(2, 2), BIDISC, 2)]
    parts, ok = [], True
    for lab, f, dom, expected in cases:
        est = growth_order_estimate(f, dom)
        good = abs(est - expected) <= 0.5
        ok &= good
        parts.append(f"{lab}: {est:.3f} vs {expected}{'' if good else ' (off)'}")
    assert report(12, ok, "; ".join(parts))


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
