"""Deterministic CSV/JSON output and the scenario check suite."""
import csv
import io
import json
import logging
import math
from pathlib import Path

import numpy as np

from .evolution import FREE, free_propagate, run_trajectory
from .exceptions import ConfigurationError, CorrflowError, GridTooSmallError, GuardError
from .grid import boundary_mass, nyquist_ratio
from .observables import CSV_FIELDS, momentum_density, moments
from .oracle import MomentLaw, correlation_at, waist_time, x2_at
from .scenario import load_scenario

log = logging.getLogger(__name__)

SCENARIO_SUFFIX = ".scn"


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


class _Sink:
    """Open ``sink`` for writing if it is a path; pass file objects through."""

    def __init__(self, sink):
        self.sink = sink
        self.handle = None

    def __enter__(self):
        if hasattr(self.sink, "write"):
            return self.sink
        self.handle = open(self.sink, "w", encoding="utf-8", newline="")
        return self.handle

    def __exit__(self, *exc):
        if self.handle is not None:
            self.handle.close()


def write_csv(header, rows, sink):
    with _Sink(sink) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) if not isinstance(v, str) else v for v in row])


def emit_timeseries_csv(series, sink):
    """Write ``series`` as CSV with full double precision.

    Identical series always produce byte-identical output.
    """
    if series is None or len(series) == 0:
        raise ConfigurationError("cannot emit an empty time series")
    write_csv(CSV_FIELDS, (s.as_row() for s in series), sink)


def timeseries_csv_text(series):
    buf = io.StringIO()
    emit_timeseries_csv(series, buf)
    return buf.getvalue()


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps_json(obj):
    return json.dumps(_clean(obj), indent=2) + "\n"


def write_json(obj, sink):
    with _Sink(sink) as out:
        out.write(dumps_json(obj))


# ---------------------------------------------------------------------------
# gates


def gate(name, max_residual, tolerance, passed, note=None):
    out = {"name": name, "max_residual": max_residual, "tolerance": tolerance, "pass": bool(passed)}
    if note:
        out["note"] = note
    return out


def _upper(name, residual, tolerance, note=None):
    return gate(name, residual, tolerance, residual <= tolerance, note)


class _Recorder:
    """Collects per-sample state diagnostics while a trajectory runs."""

    def __init__(self):
        self.leak = []
        self.nyquist = []
        self.density_drift = []
        self.first_density = None

    def __call__(self, ms, psi):
        self.leak.append(boundary_mass(psi))
        self.nyquist.append(nyquist_ratio(psi))
        density = momentum_density(psi)
        if self.first_density is None:
            self.first_density = density
        self.density_drift.append(float(np.max(np.abs(density - self.first_density))))


def _guard_gates(rec, tol):
    return [
        _upper("leak_guard", max(rec.leak), tol["leak"]),
        _upper("nyquist_guard", max(rec.nyquist), tol["nyquist"]),
    ]


def free_gates(scenario, series, psi0, rec):
    tol = scenario.tolerances
    consts = scenario.consts
    m, hbar = consts.mass, consts.hbar
    t = series.times
    c = series.column("mean_c")
    cov = series.column("cov_xp")
    h = series.column("mean_h")
    x2 = series.column("mean_x2")
    var_x = series.column("var_x")
    var_p = series.column("var_p")
    norm = series.column("norm")
    first = series[0]
    law = MomentLaw.from_moments(first, consts)
    centred = MomentLaw.from_moments(first, consts, centered=True)
    floor = hbar**2 / 4.0

    gates = _guard_gates(rec, tol)
    gates.append(_upper("norm_drift", float(np.max(np.abs(norm - norm[0]))), tol["norm_drift"]))
    decrease = max(0.0, -float(np.min(np.diff(c))))
    gates.append(_upper("monotonicity", decrease, tol["monotonicity"]))
    gates.append(_upper("correlation_law", float(np.max(np.abs(c - (c[0] + 2.0 * h[0] * t)))),
                        tol["correlation_law"]))
    gates.append(_upper("covariance_law", float(np.max(np.abs(cov - correlation_at(centred, t)))),
                        tol["covariance_law"]))
    gates.append(_upper("mean_h_drift", float(np.max(np.abs(h - h[0]))), tol["mean_h_drift"]))
    gates.append(_upper("variance_law", float(np.max(np.abs(x2 - x2_at(law, t)))), tol["variance_law"]))
    fd = np.diff(x2) / np.diff(t)
    mid_c = 0.5 * (c[1:] + c[:-1])
    gates.append(_upper("variance_fd", float(np.max(np.abs(fd - 2.0 * mid_c / m))), tol["variance_fd"]))
    gates.append(_upper("momentum_density", max(rec.density_drift), tol["momentum_density"]))
    rs_deficit = float(np.max((floor - (var_x * var_p - cov**2)) / floor))
    gates.append(_upper("uncertainty", max(rs_deficit, 0.0), tol["uncertainty"]))
    heis_deficit = float(np.max((floor - var_x * var_p) / floor))
    gates.append(_upper("heisenberg", max(heis_deficit, 0.0), tol["uncertainty"]))

    spacing = scenario.schedule.spacing
    # sampled moments carry roundoff; treat a covariance at that level as zero
    waist = waist_time(centred, atol=1e-12 * (centred.x2_0 * centred.p2_0) ** 0.5)
    simulated = float(t[int(np.argmin(var_x))])
    t_star = {"oracle": waist.time, "simulated": simulated}
    if not waist.already_expanding:
        if waist.time > t[-1]:
            gates.append(gate("waist", None, spacing, True, note="waist beyond t_end"))
        else:
            gates.append(_upper("waist", abs(simulated - waist.time), spacing))
            gates.append(_upper("correlation_zero_crossing", abs(_zero_crossing(t, cov) - waist.time), spacing))
            if scenario.state_kind == "gaussian":
                at_waist = moments(free_propagate(psi0, waist.time, consts, check=False), consts, waist.time)
                gates.append(_upper("waist_saturation", abs(at_waist.var_x * at_waist.var_p - floor),
                                    tol["saturation"]))
    return gates, t_star


def _zero_crossing(t, values):
    """First upward zero crossing, linearly interpolated between samples."""
    idx = np.nonzero(values >= 0)[0]
    if len(idx) == 0:
        return math.inf
    i = int(idx[0])
    if i == 0:
        return float(t[0])
    t0, t1, v0, v1 = t[i - 1], t[i], values[i - 1], values[i]
    return float(t0 - v0 * (t1 - t0) / (v1 - v0))


def potential_gates(scenario, series, rec):
    tol = scenario.tolerances
    c = series.column("mean_c")
    energy = series.column("mean_h") + series.column("mean_v")
    norm = series.column("norm")
    gates = _guard_gates(rec, tol)
    gates.append(_upper("norm_drift", float(np.max(np.abs(norm - norm[0]))), tol["norm_drift"]))
    gates.append(gate("monotonicity", None, tol["monotonicity"], True, note="not applicable (potential mode)"))
    if scenario.witness:
        decrease = max(0.0, -float(np.min(np.diff(c))))
        gates.append(gate("non_monotonicity_witness", decrease, tol["witness"], decrease > tol["witness"]))
    gates.append(_upper("energy", float(np.max(np.abs(energy - energy[0]))), tol["energy"]))
    return gates


def evaluate_scenario(scenario):
    """Run one scenario and evaluate every applicable gate."""
    result = {"scenario": scenario.name, "pass": False, "gates": [],
              "t_star": {"oracle": None, "simulated": None}}
    tol = scenario.tolerances
    try:
        grid = scenario.build_grid()
        psi0 = scenario.build_state(grid)
    except GuardError as exc:
        name, limit = ("leak_guard", tol["leak"]) if isinstance(exc, GridTooSmallError) else ("nyquist_guard", tol["nyquist"])
        result["gates"].append(gate(name, None, limit, False, note=str(exc)))
        result["error"] = str(exc)
        return result
    except CorrflowError as exc:
        result["error"] = str(exc)
        return result

    rec = _Recorder()
    series = run_trajectory(
        psi0, scenario.schedule, mode=scenario.mode, consts=scenario.consts,
        potential=scenario.build_potential(grid), dt=scenario.dt,
        leak_threshold=tol["leak"], nyquist_threshold=tol["nyquist"],
        provenance=scenario.name, observer=rec,
    )
    if scenario.mode == FREE:
        gates, t_star = free_gates(scenario, series, psi0, rec)
        result["t_star"] = t_star
    else:
        gates = potential_gates(scenario, series, rec)
    result["gates"] = gates
    result["pass"] = all(g["pass"] for g in gates)
    return result


def collect_scenario_paths(inputs):
    paths = []
    for item in inputs:
        item = Path(item)
        if item.is_dir():
            paths.extend(sorted(item.glob(f"*{SCENARIO_SUFFIX}")))
        else:
            paths.append(item)
    return paths


def check_scenarios(inputs, environ=None):
    """Evaluate scenarios (files, directories of ``*.scn`` files or
    :class:`Scenario` objects) and return the report dictionary.

    Loading errors are reported per scenario without aborting the suite.
    """
    results = []
    seen = set()
    for item in _expand(inputs, environ):
        if isinstance(item, tuple):
            path, error = item
            results.append(_failed(Path(path).stem, error))
            continue
        if item.name in seen:
            results.append(_failed(item.name, f"duplicate scenario name {item.name!r}"))
            continue
        seen.add(item.name)
        result = evaluate_scenario(item)
        log.info("%s: %s", item.name, "pass" if result["pass"] else "FAIL")
        results.append(result)
    return {"pass": bool(results) and all(r["pass"] for r in results), "scenarios": results}


def run_check_suite(inputs, report=None, environ=None):
    """Run the check suite, write the JSON report to ``report`` (path or
    file object) and return the exit status: 0 iff every gate passes."""
    summary = check_scenarios(inputs, environ)
    if report is not None:
        write_json(summary, report)
    return 0 if summary["pass"] else 1


def _failed(name, error):
    return {"scenario": name, "pass": False, "gates": [], "t_star": {"oracle": None, "simulated": None},
            "error": error}


def _expand(inputs, environ):
    for item in inputs:
        if hasattr(item, "schedule"):
            yield item
            continue
        for path in collect_scenario_paths([item]):
            try:
                yield load_scenario(path, environ=environ)
            except (CorrflowError, OSError, UnicodeDecodeError) as exc:
                yield (path, str(exc))
