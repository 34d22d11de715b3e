"""
Harness - Space and time refinement studies with observed convergence rates.

A study runs one simulation per (degree, resolution) cell, measures the L2
error of every component against the manufactured solution and turns the
errors into observed rates. Cells are independent and may run on a thread
pool; results are gathered by cell index so the table never depends on the
schedule.

Version: 1.0 (2025-03-13)
"""
from typing import Dict, List, Optional, Sequence, Tuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import csv
import logging
import math

import numpy as np

from dg_solver.dg_core import BoundaryMode
from dg_solver.errors import BlowUpError, ConfigError, DomainError
from dg_solver.meshbasis import build_mesh, l2_error
from dg_solver.problems import PROBLEMS, ManufacturedProblem
from dg_solver.timestep import BLOWUP_THRESHOLD, MAX_START_SUBSTEPS, SchemeKind, integrate


logger = logging.getLogger("dg_study")

CSV_HEADER = ["degree", "resolution", "component", "l2_error", "rate"]

# Relative slack when checking that L/h or T/dt is an integer.
_INTEGRALITY_TOL = 1e-9


class StudyMode(Enum):
    """Which discretization parameter is refined."""
    SPACE = "space"
    TIME = "time"


@dataclass
class StudyConfig:
    """A refinement study.

    Space studies sweep h with fixed_dt and num_steps; time studies sweep dt
    with fixed_h and final_time.

    Attributes:
        problem: Problem id, a key of PROBLEMS
        mode: Refined parameter
        degrees: Polynomial degrees k
        resolutions: Values of h or dt, strictly decreasing
        fixed_dt: Step size of a space study
        num_steps: Step count of a space study
        fixed_h: Element width of a time study
        final_time: End time of a time study
        scheme: Time integrator
        bc: Boundary treatment
        ab2_substeps: Forward Euler substeps for the AB2 start, automatic when None
        output: CSV path, or None for no file
        workers: Thread-pool size for independent cells
        blowup_threshold: Largest coefficient magnitude accepted
        max_start_substeps: Cap on the automatic AB2 start substeps
    """
    problem: str
    mode: StudyMode
    degrees: List[int]
    resolutions: List[float]
    fixed_dt: Optional[float] = None
    num_steps: Optional[int] = None
    fixed_h: Optional[float] = None
    final_time: Optional[float] = None
    scheme: SchemeKind = SchemeKind.ADAMS_BASHFORTH2
    bc: BoundaryMode = BoundaryMode.PERIODIC
    ab2_substeps: Optional[int] = None
    output: Optional[str] = None
    workers: int = 1
    blowup_threshold: float = BLOWUP_THRESHOLD
    max_start_substeps: int = MAX_START_SUBSTEPS

    def validate(self) -> None:
        """Check the configuration.

        Raises:
            ConfigError: Describing the first problem found
        """
        if self.problem not in PROBLEMS:
            raise ConfigError(f"Unknown problem {self.problem!r}, expected one of {sorted(PROBLEMS)}")
        if not self.degrees:
            raise ConfigError("At least one polynomial degree is required")
        if any(k < 0 for k in self.degrees):
            raise ConfigError(f"Polynomial degrees must be nonnegative, got {self.degrees}")
        if not self.resolutions:
            raise ConfigError("At least one resolution is required")
        if any(not r > 0 for r in self.resolutions):
            raise ConfigError(f"Resolutions must be positive, got {self.resolutions}")
        if any(b >= a for a, b in zip(self.resolutions, self.resolutions[1:])):
            raise ConfigError(f"Resolutions must be strictly decreasing, got {self.resolutions}")
        if self.mode is StudyMode.SPACE:
            if self.fixed_dt is None or not self.fixed_dt > 0:
                raise ConfigError("A space study needs a positive fixed time step (--dt)")
            if self.num_steps is None or self.num_steps < 0:
                raise ConfigError("A space study needs a nonnegative step count (--steps)")
        else:
            if self.fixed_h is None or not self.fixed_h > 0:
                raise ConfigError("A time study needs a positive fixed element width (--h)")
            if self.final_time is None or not self.final_time > 0:
                raise ConfigError("A time study needs a positive final time (--final-time)")
        if self.ab2_substeps is not None and self.ab2_substeps < 1:
            raise ConfigError(f"AB2 start needs at least one substep, got {self.ab2_substeps}")
        if self.workers < 1:
            raise ConfigError(f"Worker count must be at least 1, got {self.workers}")


@dataclass(frozen=True)
class RateRow:
    """One (degree, resolution) cell of a study.

    Attributes:
        degree: Polynomial degree k
        resolution: h or dt
        errors: Per-component L2 errors, None for a failed cell
        rates: Per-component observed rates, None where undefined
        failure: Reason the cell failed, None on success
    """
    degree: int
    resolution: float
    errors: Optional[Tuple[float, ...]]
    rates: Tuple[Optional[float], ...]
    failure: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class RateTable:
    """Errors and observed rates of a study, ordered by degree then decreasing resolution."""
    component_names: Tuple[str, ...]
    rows: Tuple[RateRow, ...]
    problem: str = field(default="", compare=False)
    mode: str = field(default="", compare=False)

    @property
    def failed(self) -> bool:
        return any(row.errors is None for row in self.rows)


def compute_rates(errors: Sequence[float], resolutions: Sequence[float]) -> List[Optional[float]]:
    """Observed convergence rates between successive resolutions.

    rate[i] = log(e[i-1]/e[i]) / log(r[i-1]/r[i]); rate[0] is None.

    Args:
        errors: Positive errors, one per resolution
        resolutions: Resolutions in the same order

    Returns:
        List of rates of the same length as errors

    Raises:
        ValueError: If the lengths differ, a list is empty, an error is not
            positive or two successive resolutions coincide
    """
    if len(errors) != len(resolutions):
        raise ValueError(f"Got {len(errors)} errors for {len(resolutions)} resolutions")
    if not errors:
        raise ValueError("At least one error is required")
    if any(not e > 0 for e in errors):
        raise ValueError(f"Errors must be positive to compute rates, got {list(errors)}")
    rates: List[Optional[float]] = [None]
    for i in range(1, len(errors)):
        ratio = resolutions[i - 1] / resolutions[i]
        if ratio <= 0 or ratio == 1.0:
            raise ValueError(f"Resolutions {resolutions[i - 1]} and {resolutions[i]} give no rate")
        rates.append(math.log(errors[i - 1] / errors[i]) / math.log(ratio))
    return rates


def _integer_ratio(total: float, step: float, what: str) -> int:
    count = round(total / step)
    if count < 1 or abs(count * step - total) > _INTEGRALITY_TOL * total:
        raise ConfigError(f"{what}: {total} is not an integer multiple of {step}")
    return int(count)


def _cell_setup(cfg: StudyConfig, problem: ManufacturedProblem, resolution: float) -> Tuple[int, float, int]:
    """Element count, step size and step count of one cell."""
    if cfg.mode is StudyMode.SPACE:
        assert cfg.fixed_dt is not None and cfg.num_steps is not None
        elements = _integer_ratio(problem.length, resolution, "Element width")
        return elements, cfg.fixed_dt, cfg.num_steps
    assert cfg.fixed_h is not None and cfg.final_time is not None
    elements = _integer_ratio(problem.length, cfg.fixed_h, "Element width")
    return elements, resolution, _integer_ratio(cfg.final_time, resolution, "Time step")


def _run_cell(
    cfg: StudyConfig,
    problem: ManufacturedProblem,
    degree: int,
    resolution: float
) -> Tuple[Optional[Tuple[float, ...]], Optional[str]]:
    elements, dt, steps = _cell_setup(cfg, problem, resolution)
    mesh = build_mesh(problem.length, elements)
    try:
        solution = integrate(
            problem, cfg.scheme, mesh, degree, dt, steps,
            bc=cfg.bc,
            substeps=cfg.ab2_substeps,
            blowup_threshold=cfg.blowup_threshold,
            max_start_substeps=cfg.max_start_substeps,
        )
    except (BlowUpError, DomainError) as e:
        logger.warning(f"{problem.label} k={degree} {cfg.mode.value}={resolution:.4e} failed: {str(e)}")
        return None, str(e)
    errors = tuple(float(e) for e in l2_error(solution, problem.exact_at(steps * dt)))
    logger.info(
        f"{problem.label} k={degree} {cfg.mode.value}={resolution:.4e}: "
        + ", ".join(f"{name}={e:.5e}" for name, e in zip(problem.component_names, errors))
    )
    return errors, None


def _degree_rows(
    degree: int,
    resolutions: Sequence[float],
    results: Sequence[Tuple[Optional[Tuple[float, ...]], Optional[str]]],
    num_components: int
) -> List[RateRow]:
    """Rows of one degree; a rate needs both neighbouring cells to have succeeded."""
    rates: List[List[Optional[float]]] = [[None] * num_components for _ in resolutions]
    for i in range(1, len(resolutions)):
        previous, current = results[i - 1][0], results[i][0]
        if previous is None or current is None:
            continue
        for c in range(num_components):
            if previous[c] > 0 and current[c] > 0:
                rates[i][c] = compute_rates(
                    [previous[c], current[c]], [resolutions[i - 1], resolutions[i]]
                )[1]
    return [
        RateRow(degree, resolution, errors, tuple(rates[i]), failure)
        for i, (resolution, (errors, failure)) in enumerate(zip(resolutions, results))
    ]


def run_study(cfg: StudyConfig) -> RateTable:
    """Run every cell of a study and assemble the rate table.

    Args:
        cfg: Study configuration

    Returns:
        The rate table; cells that blew up appear as failed rows

    Raises:
        ConfigError: If the configuration is invalid
    """
    cfg.validate()
    problem = PROBLEMS[cfg.problem]()
    degrees = sorted(set(cfg.degrees))
    resolutions = [float(r) for r in cfg.resolutions]
    # Catch non-integral L/h or T/dt before any cell runs.
    for resolution in resolutions:
        _cell_setup(cfg, problem, resolution)

    cells = [(k, r) for k in degrees for r in resolutions]
    logger.info(
        f"Running {cfg.problem} {cfg.mode.value} study: {len(cells)} cells on {cfg.workers} worker(s)"
    )
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(lambda cell: _run_cell(cfg, problem, *cell), cells))

    rows: List[RateRow] = []
    for index, degree in enumerate(degrees):
        chunk = results[index * len(resolutions):(index + 1) * len(resolutions)]
        rows.extend(_degree_rows(degree, resolutions, chunk, problem.num_components))
    return RateTable(problem.component_names, tuple(rows), cfg.problem, cfg.mode.value)


def _format_resolution(value: float) -> str:
    return np.format_float_scientific(value, unique=True, trim="-", exp_digits=1)


def _format_error(value: float) -> str:
    # Shortest representation that reads back exactly, never below six significant digits.
    return np.format_float_scientific(value, unique=True, trim="k", exp_digits=1, min_digits=5)


def _format_rate(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.2f}"


def emit_csv(table: RateTable, path: str) -> None:
    """Write a rate table as CSV.

    Args:
        table: The table
        path: Output file

    Raises:
        OSError: If the file cannot be written; the message names the path
    """
    rows = sorted(table.rows, key=lambda row: (row.degree, -row.resolution))
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_HEADER, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                for c, name in enumerate(table.component_names):
                    writer.writerow({
                        "degree": row.degree,
                        "resolution": _format_resolution(row.resolution),
                        "component": name,
                        "l2_error": "" if row.errors is None else _format_error(row.errors[c]),
                        "rate": _format_rate(row.rates[c]),
                    })
    except OSError as e:
        raise OSError(f"Cannot write CSV file {path}: {e.strerror or str(e)}") from e


def read_csv(path: str) -> RateTable:
    """Read a table written by emit_csv.

    Rates are recomputed from the stored errors, so reading back an emitted
    table reproduces it exactly.

    Raises:
        ConfigError: If the header or a row is malformed
    """
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != CSV_HEADER:
            raise ConfigError(f"{path}: expected header {','.join(CSV_HEADER)}, got {reader.fieldnames}")
        records = list(reader)

    names: List[str] = []
    cells: Dict[Tuple[int, float], Dict[str, str]] = {}
    try:
        for record in records:
            key = (int(record["degree"]), float(record["resolution"]))
            if record["component"] not in names:
                names.append(record["component"])
            cells.setdefault(key, {})[record["component"]] = record["l2_error"]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: malformed row: {str(e)}")

    rows: List[RateRow] = []
    for degree in sorted({k for k, _ in cells}):
        resolutions = sorted((r for k, r in cells if k == degree), reverse=True)
        results: List[Tuple[Optional[Tuple[float, ...]], Optional[str]]] = []
        for resolution in resolutions:
            fields = cells[(degree, resolution)]
            if any(not fields.get(name) for name in names):
                results.append((None, "failed"))
            else:
                results.append((tuple(float(fields[name]) for name in names), None))
        rows.extend(_degree_rows(degree, resolutions, results, len(names)))
    return RateTable(tuple(names), tuple(rows))


def format_table(table: RateTable) -> str:
    """Render a table for the terminal.

    One block per component; columns hold the error and two-decimal rate of
    each degree, with '--' for an absent rate and 'failed' for a failed cell.
    """
    degrees = sorted({row.degree for row in table.rows})
    resolutions = sorted({row.resolution for row in table.rows}, reverse=True)
    lookup = {(row.degree, row.resolution): row for row in table.rows}
    label = "dt" if table.mode == StudyMode.TIME.value else "h"
    title = " ".join(part for part in (table.problem, table.mode) if part)

    lines: List[str] = []
    for c, name in enumerate(table.component_names):
        lines.append(f"Errors and rates for {name}" + (f" ({title})" if title else ""))
        header = f"{label:>10} |" + "".join(f" {'k=' + str(k) + ' error':>12} {'rate':>6} |" for k in degrees)
        lines.append(header)
        lines.append("-" * len(header))
        for resolution in resolutions:
            line = f"{resolution:>10.3e} |"
            for degree in degrees:
                row = lookup.get((degree, resolution))
                if row is None:
                    line += f" {'':>12} {'':>6} |"
                elif row.errors is None:
                    line += f" {'failed':>12} {'':>6} |"
                else:
                    rate = row.rates[c]
                    line += f" {row.errors[c]:>12.5e} {'--' if rate is None else f'{rate:.2f}':>6} |"
            lines.append(line)
        lines.append("")
    return "\n".join(lines).rstrip("\n")
