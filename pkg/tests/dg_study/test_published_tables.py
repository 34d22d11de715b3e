"""Reproduction of the published error and rate tables through the presets.

Space tables are checked on their three finest rows (5 % relative) and the
finest-pair rate (k+1 +/- 0.15). Time tables are checked on every row (10 %
relative) and on rates within 0.05 of those of the published errors.
"""
from typing import Dict, List, Tuple

import pytest

from dg_study.harness import RateTable, compute_rates, run_study
from dg_study.presets import SPACE_RESOLUTIONS, TIME_RESOLUTIONS, get_preset


Reference = Dict[Tuple[str, int], List[float]]

BURGERS_SPACE: Reference = {
    ("u", 1): [3.07771e-1, 6.27869e-2, 1.61362e-2, 4.07971e-3, 1.03845e-3],
    ("u", 2): [1.72638e-2, 8.38603e-3, 1.07254e-3, 1.35112e-4, 1.70494e-5],
    ("u", 3): [1.72640e-2, 8.34443e-4, 5.34700e-5, 3.42942e-6, 2.26734e-7],
}

BURGERS_TIME: Reference = {
    ("u", 8): [3.01560e-7, 7.53310e-8, 1.88202e-8, 4.87902e-9],
    ("u", 9): [3.04272e-7, 7.60427e-8, 1.90062e-8, 4.74971e-9],
}

BLOODFLOW_SPACE: Reference = {
    ("A", 1): [8.50463e-2, 6.27702e-2, 1.61152e-2, 4.05695e-3, 1.01713e-3],
    ("A", 2): [8.50463e-2, 8.38200e-3, 1.07125e-3, 1.34722e-4, 1.69031e-5],
    ("A", 3): [2.77383e-3, 8.33345e-4, 5.31039e-5, 3.34118e-6, 2.10357e-7],
    ("Q", 1): [3.07761e-1, 6.27688e-2, 1.61145e-2, 4.05679e-3, 1.01736e-3],
    ("Q", 2): [1.72654e-2, 8.38233e-3, 1.07130e-3, 1.34717e-4, 1.68933e-5],
    ("Q", 3): [1.72638e-2, 8.33176e-4, 5.30850e-5, 3.33998e-6, 2.10567e-7],
}

BLOODFLOW_TIME: Reference = {
    ("A", 8): [2.90612e-7, 7.27141e-8, 1.82053e-8, 4.59094e-9],
    ("A", 9): [2.98344e-7, 7.46399e-8, 1.86720e-8, 4.67588e-9],
    ("Q", 8): [1.88619e-7, 4.71556e-8, 1.18056e-8, 2.99433e-9],
    ("Q", 9): [1.91639e-7, 4.79006e-8, 1.19766e-8, 2.99764e-9],
}


def column(table: RateTable, component: str, degree: int) -> Tuple[List[float], List[float]]:
    """Errors and rates of one component and degree, in table order."""
    c = table.component_names.index(component)
    rows = [row for row in table.rows if row.degree == degree]
    assert all(row.errors is not None for row in rows)
    return [row.errors[c] for row in rows], [row.rates[c] for row in rows]  # type: ignore[index,misc]


def check_space(table: RateTable, reference: Reference) -> None:
    for (component, degree), expected in reference.items():
        errors, rates = column(table, component, degree)
        assert errors[-3:] == pytest.approx(expected[-3:], rel=0.05), (component, degree)
        assert rates[-1] == pytest.approx(degree + 1, abs=0.15), (component, degree)


def check_time(table: RateTable, reference: Reference) -> None:
    for (component, degree), expected in reference.items():
        errors, rates = column(table, component, degree)
        assert errors == pytest.approx(expected, rel=0.10), (component, degree)
        published = compute_rates(expected, TIME_RESOLUTIONS)
        assert rates[1:] == pytest.approx(published[1:], abs=0.05), (component, degree)
        assert all(r == pytest.approx(2.0, abs=0.06) for r in rates[1:]), (component, degree)


def test_burgers_space_table() -> None:
    """Test the Burgers space-refinement table."""
    table = run_study(get_preset("paper-burgers-space"))
    assert [row.resolution for row in table.rows[:5]] == SPACE_RESOLUTIONS
    check_space(table, BURGERS_SPACE)


def test_bloodflow_space_table() -> None:
    """Test the blood-flow space-refinement tables for A and Q."""
    check_space(run_study(get_preset("paper-bloodflow-space")), BLOODFLOW_SPACE)


@pytest.mark.slow
def test_burgers_time_table() -> None:
    """Test the Burgers time-refinement table."""
    check_time(run_study(get_preset("paper-burgers-time")), BURGERS_TIME)


@pytest.mark.slow
def test_bloodflow_time_table() -> None:
    """Test the blood-flow time-refinement tables for A and Q."""
    check_time(run_study(get_preset("paper-bloodflow-time")), BLOODFLOW_TIME)
