"""
Eight-input g-function at N = 2^14: QMC estimates against closed forms and the published table.
"""

import logging

import numpy as np
import pytest

from dgsmkit.core.bounds import ReportOptions, assemble_report
from dgsmkit.core.qmc import SamplePlan
from dgsmkit.functions.g_function import make_g_function
from dgsmkit.functions.registry import G_FUNCTION_8_A
from dgsmkit.functions.tables import compare_with_reference

logger = logging.getLogger(__name__)

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def setting():
    function = make_g_function(G_FUNCTION_8_A)
    report = assemble_report(function.model, SamplePlan(8, 2**14), ReportOptions(empirical_range=False))
    return function, report


def test_important_inputs(setting):
    """Inputs 1-4 agree with the closed forms within 2%."""
    function, report = setting
    for quantity in ("s_tot", "ub1", "ub2", "lb_star"):
        for i in range(1, 5):
            assert report.value(quantity, i) == pytest.approx(function.reference(quantity, i), rel=0.02), (quantity, i)
    for i in (1, 2):
        assert report.value("s", i) == pytest.approx(function.reference("s", i), rel=0.02)
    for i in (3, 4):
        assert report.value("s", i) == pytest.approx(function.reference("s", i), abs=2e-3)


def test_weak_inputs(setting):
    """Inputs 5-8 agree with the closed forms in absolute terms."""
    function, report = setting
    for i in range(5, 9):
        for quantity in ("s_tot", "ub1", "ub2", "lb_star"):
            assert report.value(quantity, i) == pytest.approx(function.reference(quantity, i), abs=5e-5)
        assert report.value("s", i) == pytest.approx(function.reference("s", i), abs=2.5e-4)


def test_m_star_and_lb1(setting):
    """The numeric maximizer matches the closed form and LB1 is negligible."""
    function, report = setting
    for i in range(1, 9):
        assert report.value("m_star", i) == pytest.approx(function.reference("m_star", i), abs=0.05)
    assert all(v < 1e-3 for v in report.column("lb1"))


def test_ranking(setting):
    """Every bound puts the four important inputs first, in order."""
    _, report = setting
    for key, order in report.ranking["orders"].items():
        assert order[:4] == [1, 2, 3, 4], key


def test_ledger(setting):
    """The ledger follows the N(3d+1) and N(d+1) cost model."""
    _, report = setting
    assert report.ledger.n_f_lb == 2**14 * 25
    assert report.ledger.n_f_ub == 2**14 * 9


def test_published_table(setting):
    """Bounds and totals match the printed table."""
    _, report = setting
    result = compare_with_reference(report, "g-function-8")
    failed = [e for e in result["entries"] if not e["passed"] and e["quantity"] != "s"]
    for e in result["entries"]:
        logger.info("%s x%d: %s vs %s", e["quantity"], e["variable"], e["actual"], e["expected"])
    assert failed == []


def test_sandwich(setting):
    """LB* <= S_tot <= min(UB1, UB2) on the estimates."""
    _, report = setting
    lb = np.array(report.column("lb_star"))
    total = np.array(report.column("s_tot"))
    ub = np.minimum(report.column("ub1"), report.column("ub2"))
    assert np.all(lb <= total + 1e-6)
    assert np.all(total <= ub + 1e-6)
