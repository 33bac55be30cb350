"""Parallel parameter sweeps over families of Gaussian initial states.

A family file uses the scenario syntax with a ``[family]`` section whose
keys (``sigma``, ``chirp``, ``p0``, ``x0``) hold either one value or
``start, stop, count`` for an evenly spaced range::

    name = arrow
    [family]
    sigma = 0.5, 2, 10
    chirp = -1, 1, 10
    [schedule]
    t_end = 2
    n_samples = 51

Every point is evaluated independently, so the numbers do not depend on
the number of worker processes.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import itertools
import math
from pathlib import Path
import time

import numpy as np

from .evolution import run_trajectory
from .exceptions import CorrflowError, ScenarioError
from .grid import PhysicalConstants, describe_flags
from .report import write_csv
from .scenario import (
    Issue,
    SectionReader,
    _read_constants,
    _read_grid,
    _read_schedule,
    _read_tolerances,
    _str,
    read_sections,
)
from .states import GaussianSpec, auto_grid, make_gaussian

FAMILY_KEYS = ("sigma", "chirp", "p0", "x0")
FAMILY_DEFAULTS = {"sigma": (1.0,), "chirp": (0.0,), "p0": (0.0,), "x0": (0.0,)}
SWEEP_FIELDS = ("index", "sigma", "chirp", "p0", "x0", "status", "min_delta_c", "min_slope",
                "violations", "reason")


@dataclass(frozen=True)
class SweepFamily:
    name: str
    consts: PhysicalConstants
    schedule: object
    grid: object = None
    tolerances: dict = field(default_factory=dict, compare=False)
    sigma: tuple = (1.0,)
    chirp: tuple = (0.0,)
    p0: tuple = (0.0,)
    x0: tuple = (0.0,)

    def specs(self):
        for x0, sigma, chirp, p0 in itertools.product(self.x0, self.sigma, self.chirp, self.p0):
            yield (x0, sigma, chirp, p0)


@dataclass
class SweepPoint:
    index: int
    sigma: float
    chirp: float
    p0: float
    x0: float
    status: str
    min_delta_c: float = None
    min_slope: float = None
    violations: int = 0
    reason: str = ""
    wall_time: float = 0.0

    def row(self):
        return tuple("" if v is None else v for v in (
            self.index, self.sigma, self.chirp, self.p0, self.x0, self.status,
            self.min_delta_c, self.min_slope, self.violations, self.reason,
        ))


@dataclass
class SweepSummary:
    family: str
    points: list
    tolerance: float

    @property
    def evaluated(self):
        return [p for p in self.points if p.status != "skipped"]

    @property
    def skipped(self):
        return [p for p in self.points if p.status == "skipped"]

    @property
    def violations(self):
        return sum(p.violations for p in self.points)

    @property
    def global_min_delta_c(self):
        values = [p.min_delta_c for p in self.evaluated]
        return min(values) if values else None

    @property
    def global_min_slope(self):
        values = [p.min_slope for p in self.evaluated]
        return min(values) if values else None

    @property
    def mean_wall_time(self):
        times = [p.wall_time for p in self.evaluated]
        return sum(times) / len(times) if times else 0.0

    def to_dict(self):
        """Deterministic summary (wall times are excluded)."""
        return {
            "family": self.family,
            "points": len(self.points),
            "evaluated": len(self.evaluated),
            "skipped": [_provenance(p) | {"reason": p.reason} for p in self.skipped],
            "violations": self.violations,
            "tolerance": self.tolerance,
            "global_min_delta_c": self.global_min_delta_c,
            "global_min_slope": self.global_min_slope,
            "violating": [_provenance(p) | {"min_delta_c": p.min_delta_c} for p in self.points
                          if p.violations],
        }


def _provenance(p):
    return {"index": p.index, "sigma": p.sigma, "chirp": p.chirp, "p0": p.p0, "x0": p.x0}


def _range(text):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) == 1:
        value = float(parts[0])
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return (value,)
    if len(parts) != 3:
        raise ValueError("expected 'value' or 'start, stop, count'")
    start, stop = float(parts[0]), float(parts[1])
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError("range ends must be finite")
    count = int(parts[2])
    if count < 1:
        raise ValueError("count must be >= 1")
    return tuple(float(v) for v in np.linspace(start, stop, count))


_range.description = "a value or 'start, stop, count'"


def parse_family(text, name=None, environ=None):
    issues = []
    sections, headers = read_sections(text, issues)
    for section in sections:
        if section not in ("", "family", "constants", "grid", "schedule", "tolerances"):
            issues.append(Issue(headers[section], f"unknown section [{section}]"))
    top = SectionReader("", sections[""], 1, issues, {"name"})
    family_name = top.get("name", _str, name)
    if not family_name:
        issues.append(Issue(1, "family needs a nonempty name"))
    fam = SectionReader("family", sections.get("family", {}), headers.get("family", 1), issues, set(FAMILY_KEYS))
    values = {key: fam.get(key, _range, FAMILY_DEFAULTS[key]) for key in FAMILY_KEYS}
    if any(s <= 0 for s in values["sigma"]):
        issues.append(Issue(fam.line("sigma"), "sigma values must all be > 0"))
    consts = _read_constants(sections, headers, issues)
    grid = _read_grid(sections, headers, issues)
    schedule = _read_schedule(sections, headers, issues)
    tolerances = _read_tolerances(sections, headers, issues, environ)
    if issues:
        issues.sort(key=lambda i: i.line)
        raise ScenarioError(issues)
    return SweepFamily(family_name, consts, schedule, grid, tolerances, **values)


def load_family(path, environ=None):
    path = Path(path)
    return parse_family(path.read_text(encoding="utf-8"), name=path.stem, environ=environ)


def evaluate_point(family, index, x0, sigma, chirp, p0):
    """Run one sweep point; guard problems mark it skipped with a reason."""
    point = SweepPoint(index, sigma, chirp, p0, x0, status="skipped")
    tol = family.tolerances
    guards = dict(leak_threshold=tol.get("leak", 1e-12), nyquist_threshold=tol.get("nyquist", 1e-10))
    start = time.perf_counter()
    try:
        spec = GaussianSpec(x0=x0, p0=p0, sigma=sigma, chirp=chirp)
        grid = family.grid or auto_grid([spec], family.schedule.t_end, family.consts)
        psi0 = make_gaussian(spec, grid, family.consts, **guards)
    except CorrflowError as exc:
        point.reason = str(exc)
        return point
    series = run_trajectory(psi0, family.schedule, consts=family.consts, provenance=family.name, **guards)
    flagged = series.flagged
    if flagged:
        point.reason = f"guard violation at t={flagged[0].time!r}: {describe_flags(flagged[0].guard_flags)}"
        return point
    diffs = np.diff(series.column("mean_c"))
    point.min_delta_c = float(diffs.min())
    point.min_slope = float((diffs / np.diff(series.times)).min())
    point.violations = int(np.count_nonzero(diffs < -tol.get("monotonicity", 1e-9)))
    point.status = "violation" if point.violations else "ok"
    point.wall_time = time.perf_counter() - start
    return point


def _evaluate(args):
    return evaluate_point(*args)


def run_sweep(family, jobs=1):
    """Evaluate every point of ``family`` with ``jobs`` worker processes."""
    if int(jobs) != jobs or jobs < 1:
        raise ValueError(f"jobs must be a positive integer, got {jobs}")
    tasks = [(family, i, *spec) for i, spec in enumerate(family.specs())]
    if jobs == 1:
        points = [_evaluate(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            points = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return SweepSummary(family.name, points, family.tolerances.get("monotonicity", 1e-9))


def emit_sweep_csv(summary, sink):
    write_csv(SWEEP_FIELDS, (p.row() for p in summary.points), sink)

