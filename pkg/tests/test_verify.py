import numpy as np
import pytest

from boundary_currents.holofunc import constant, inv_pole, monomial, zbar_perturbed
from boundary_currents.verify import (CHECKS, CheckReport, check_edge, check_growth_extension,
                                      check_reconstruction, check_weinstock, random_polynomials)


def test_report_pass_logic():
    rep = CheckReport("x", "inputs")
    assert not rep.passed  # no cases, nothing verified
    rep.add("a", 1e-7, 1e-6)
    assert rep.passed
    rep.add("b", np.nan, 1.0)
    assert not rep.passed and rep.residuals[-1][1] == float("inf")


def test_report_fail_records_note():
    rep = CheckReport("x", "inputs")
    rep.fail("case", RuntimeError("boom"))
    assert not rep.passed
    assert "boom" in rep.notes[-1]


def test_registry():
    assert len(CHECKS) == 7
    assert all(name.startswith("check_") for name in CHECKS)


def test_random_polynomials_reproducible():
    a = random_polynomials(2, 3, seed=5)
    b = random_polynomials(2, 3, seed=5)
    assert a == b
    assert all(sum(e) <= 2 for e in a[0])


@pytest.mark.parametrize("f", [constant(1), monomial(3), inv_pole(1, 1)])
def test_weinstock_disc(f, disc):
    rep = check_weinstock(f, disc, count=4)
    assert rep.passed, rep.residuals
    assert rep.notes[0].startswith("current identities are tested weakly")


def test_weinstock_detects_perturbation(disc):
    rep = check_weinstock(zbar_perturbed(inv_pole(1, 1), 1e-2), disc, count=4)
    assert not rep.passed
    assert min(r for _, r, _ in rep.residuals) > 1e-3


def test_reconstruction_disc(disc):
    rep = check_reconstruction(inv_pole(1, 2), disc)
    assert rep.passed, rep.residuals


def test_growth_extension_disc(disc):
    rep = check_growth_extension(inv_pole(1, 1), disc)
    assert rep.passed, rep.residuals
    assert any("growth estimate" in n for n in rep.notes)


def test_growth_extension_flags_wrong_declaration(disc):
    rep = check_growth_extension(inv_pole(1, 1), disc, declared=3)
    assert not rep.passed


def test_edge_needs_two_factors(disc):
    rep = check_edge(constant(1), disc)
    assert rep.residuals == [("no edges", 0.0, 0.0)]


def test_reports_reproducible(disc):
    a = check_weinstock(inv_pole(1, 1), disc, count=3, seed=11).to_dict(timings=False)
    b = check_weinstock(inv_pole(1, 1), disc, count=3, seed=11).to_dict(timings=False)
    assert a == b
    c = check_weinstock(inv_pole(1, 1), disc, count=3, seed=12).to_dict(timings=False)
    assert c != a


def test_ladder_rows(disc):
    rep = check_weinstock(inv_pole(1, 1), disc, count=1)
    rows = rep.ladder_rows()
    assert len(rows) == 6
    assert rows[0][4] == "" and all(isinstance(r[4], float) for r in rows[1:])
