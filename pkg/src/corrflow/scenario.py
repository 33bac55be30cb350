"""Scenario files: a flat, INI-like ``key = value`` format.

Example::

    name = shrinking
    [state]
    sigma = 1
    chirp = -0.5
    [schedule]
    t_end = 2
    n_samples = 51

Sections: top level (``name``, ``seed``), ``[constants]``, ``[grid]``,
``[state]`` (plus ``[state.1]``, ``[state.2]``, ... for superpositions),
``[mode]``, ``[schedule]`` and ``[tolerances]``. ``#`` starts a comment.
Validation collects every problem, each tagged with its line number.
"""
from dataclasses import dataclass, field
import math
import os
from pathlib import Path
import re

import numpy as np

from .evolution import FREE, POTENTIAL, Schedule, harmonic_potential, run_trajectory
from .exceptions import ConfigurationError, ScenarioError
from .grid import LEAK_THRESHOLD, NYQUIST_THRESHOLD, Grid, PhysicalConstants, grid_for_extent
from .states import (
    EXTENT_MARGIN,
    GaussianSpec,
    HermiteStateSpec,
    auto_grid,
    combine,
    make_state,
)

TOL_ENV = "CORRFLOW_DEFAULT_TOL"

TOLERANCE_DEFAULTS = {
    "monotonicity": 1e-9,
    "correlation_law": 1e-8,
    "covariance_law": 1e-8,
    "variance_law": 1e-7,
    "variance_fd": 1e-5,
    "mean_h_drift": 1e-10,
    "norm_drift": 1e-10,
    "momentum_density": 1e-12,
    "uncertainty": 1e-9,
    "saturation": 1e-7,
    "witness": 1e-3,
    "energy": 1e-5,
    "leak": LEAK_THRESHOLD,
    "nyquist": NYQUIST_THRESHOLD,
}

# gates whose default CORRFLOW_DEFAULT_TOL replaces
RESIDUAL_GATES = ("correlation_law", "covariance_law", "variance_law")


def default_tolerances(environ=None):
    environ = os.environ if environ is None else environ
    tolerances = dict(TOLERANCE_DEFAULTS)
    raw = environ.get(TOL_ENV)
    if raw:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigurationError(f"{TOL_ENV} must be a positive decimal, got {raw!r}") from None
        if not (value > 0 and math.isfinite(value)):
            raise ConfigurationError(f"{TOL_ENV} must be a positive decimal, got {raw!r}")
        for name in RESIDUAL_GATES:
            tolerances[name] = value
    return tolerances


class Issue:
    def __init__(self, line, message):
        self.line = line
        self.message = message

    def __str__(self):
        return f"line {self.line}: {self.message}"

    def __repr__(self):
        return f"Issue({self.line}, {self.message!r})"


# ---------------------------------------------------------------------------
# low-level parsing

_SECTION = re.compile(r"^\[\s*([A-Za-z_][\w.]*)\s*\]$")
_PAIR = re.compile(r"^([A-Za-z_]\w*)\s*=\s*(.*)$")


def _strip_comment(line):
    return line.split("#", 1)[0].strip()


def read_sections(text, issues):
    """Return ``{section: {key: (value, line)}}`` and section header lines."""
    sections = {"": {}}
    headers = {"": 1}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1).lower()
            if current in sections:
                issues.append(Issue(lineno, f"duplicate section [{current}]"))
            sections.setdefault(current, {})
            headers.setdefault(current, lineno)
            continue
        m = _PAIR.match(line)
        if not m:
            issues.append(Issue(lineno, f"expected 'key = value', got {raw.strip()!r}"))
            continue
        key, value = m.group(1).lower(), m.group(2).strip()
        if key in sections[current]:
            issues.append(Issue(lineno, f"duplicate key {key!r}"))
            continue
        sections[current][key] = (value, lineno)
    return sections, headers


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _int(text):
    if not re.fullmatch(r"[+-]?\d+", text):
        raise ValueError("expected an integer")
    return int(text)


def _bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError("expected true/false")


def _complex(text):
    value = complex(text.replace(" ", "").replace("i", "j"))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError("must be finite")
    return value


def _str(text):
    if not text:
        raise ValueError("must not be empty")
    return text


_TYPE_NAMES = {_float: "a real number", _int: "an integer", _bool: "a boolean",
               _complex: "a complex number", _str: "a string"}


def _type_name(kind):
    return _TYPE_NAMES.get(kind) or getattr(kind, "description", "valid")


class SectionReader:
    """Typed access to one section, recording issues instead of raising."""

    def __init__(self, name, entries, header_line, issues, allowed):
        self.name = name
        self.entries = entries
        self.header_line = header_line
        self.issues = issues
        label = f"[{name}]" if name else "top level"
        for key, (_, line) in entries.items():
            if key not in allowed:
                issues.append(Issue(line, f"unknown key {key!r} in {label}"))

    def line(self, key):
        return self.entries[key][1] if key in self.entries else self.header_line

    def get(self, key, kind, default=None, required=False, check=None, describe=None):
        if key not in self.entries:
            if required:
                label = f"[{self.name}]" if self.name else "top level"
                self.issues.append(Issue(self.header_line, f"missing required key {key!r} in {label}"))
            return default
        text, line = self.entries[key]
        try:
            value = kind(text)
        except ValueError as exc:
            self.issues.append(Issue(line, f"{key} must be {_type_name(kind)}, got {text!r} ({exc})"))
            return default
        if check is not None and not check(value):
            self.issues.append(Issue(line, f"{key} must be {describe} (got {text})"))
            return default
        return value


def _positive(v):
    return v > 0


# ---------------------------------------------------------------------------
# scenario model


@dataclass(frozen=True)
class Scenario:
    name: str
    consts: PhysicalConstants
    state_kind: str
    components: tuple
    weights: tuple
    schedule: Schedule
    grid: Grid = None
    mode: str = FREE
    potential_name: str = None
    omega: float = 1.0
    dt: float = 1e-3
    table: np.ndarray = field(default=None, repr=False, compare=False)
    witness: bool = True
    tolerances: dict = field(default_factory=default_tolerances, compare=False)
    seed: int = 0
    source: str = None

    def build_grid(self):
        if self.grid is not None:
            return self.grid
        if self.mode == FREE:
            return auto_grid(self.components, self.schedule.t_end, self.consts)
        if self.potential_name == "harmonic":
            return harmonic_grid(self.components, self.omega, self.consts)
        raise ConfigurationError(f"scenario {self.name!r}: a tabulated potential needs an explicit grid")

    def build_state(self, grid=None):
        grid = self.build_grid() if grid is None else grid
        guards = dict(leak_threshold=self.tolerances["leak"], nyquist_threshold=self.tolerances["nyquist"])
        states = [make_state(spec, grid, self.consts, **guards) for spec in self.components]
        if self.state_kind == "superposition":
            return combine(states, self.weights)
        return states[0]

    def build_potential(self, grid):
        if self.mode == FREE:
            return None
        if self.potential_name == "harmonic":
            return harmonic_potential(grid, self.omega, self.consts)
        return np.interp(grid.x, self.table[:, 0], self.table[:, 1])

    def run(self, strict=False):
        grid = self.build_grid()
        psi0 = self.build_state(grid)
        return run_trajectory(
            psi0,
            self.schedule,
            mode=self.mode,
            consts=self.consts,
            potential=self.build_potential(grid),
            dt=self.dt,
            strict=strict,
            leak_threshold=self.tolerances["leak"],
            nyquist_threshold=self.tolerances["nyquist"],
            provenance=self.name,
        )


def _spec_widths(spec, consts):
    if isinstance(spec, GaussianSpec):
        return spec.sigma, math.sqrt(spec.var_p(consts))
    spread = math.sqrt(spec.max_order + 0.5)
    sx = spec.scale * spread
    return sx, consts.hbar * (spread / spec.scale + 2.0 * abs(spec.chirp) * sx)


def harmonic_grid(specs, omega, consts, margin=EXTENT_MARGIN):
    """Grid holding every component over a full oscillator period.

    Widths and centres are bounded by energy conservation of the breathing
    and dipole modes: ``var_x(t) <= var_x + var_p / (m w)^2``.
    """
    mw = consts.mass * omega
    half, k_needed = 0.0, 0.0
    for spec in specs:
        sx, sp = _spec_widths(spec, consts)
        amp_x = math.hypot(spec.x0, spec.p0 / mw)
        amp_p = math.hypot(spec.p0, mw * spec.x0)
        width_x = math.sqrt(sx**2 + (sp / mw) ** 2)
        width_p = math.sqrt(sp**2 + (mw * sx) ** 2)
        half = max(half, amp_x + margin * width_x)
        k_needed = max(k_needed, (amp_p + margin * width_p) / consts.hbar)
    return grid_for_extent(half, k_needed)


_TOP_KEYS = {"name", "seed"}
_CONST_KEYS = {"hbar", "mass"}
_GRID_KEYS = {"n", "x_min", "x_max"}
_STATE_KEYS = {"kind", "x0", "p0", "sigma", "chirp", "max_order", "scale"}
_COMPONENT_KEYS = {"x0", "p0", "sigma", "chirp", "weight"}
_MODE_KEYS = {"kind", "omega", "dt", "table", "witness"}
_SCHEDULE_KEYS = {"t_end", "n_samples"}

SCENARIO_SECTIONS = ("", "constants", "grid", "state", "mode", "schedule", "tolerances")


def _read_constants(sections, headers, issues):
    r = SectionReader("constants", sections.get("constants", {}), headers.get("constants", 1), issues, _CONST_KEYS)
    hbar = r.get("hbar", _float, 1.0, check=_positive, describe="> 0")
    mass = r.get("mass", _float, 1.0, check=_positive, describe="> 0")
    return PhysicalConstants(hbar, mass)


def _read_grid(sections, headers, issues):
    entries = sections.get("grid", {})
    r = SectionReader("grid", entries, headers.get("grid", 1), issues, _GRID_KEYS)
    if "n" in entries and entries["n"][0].lower() == "auto":
        extra = [k for k in ("x_min", "x_max") if k in entries]
        for k in extra:
            issues.append(Issue(r.line(k), f"{k} is not allowed with n = auto"))
        return None
    present = [k for k in ("n", "x_min", "x_max") if k in entries]
    if not present:
        return None
    if len(present) < 3:
        for k in ("n", "x_min", "x_max"):
            if k not in entries:
                issues.append(Issue(r.header_line, f"missing required key {k!r} in [grid] (or set n = auto)"))
        return None
    n = r.get("n", _int, check=lambda v: v >= 8 and not v & (v - 1), describe="a power of two >= 8")
    x_min = r.get("x_min", _float)
    x_max = r.get("x_max", _float)
    if None in (n, x_min, x_max):
        return None
    if not x_max > x_min:
        issues.append(Issue(r.line("x_max"), f"x_max must exceed x_min (got [{x_min}, {x_max}])"))
        return None
    return Grid(n, x_min, x_max)


def _read_gaussian(r, with_weight=False):
    values = dict(
        x0=r.get("x0", _float, 0.0),
        p0=r.get("p0", _float, 0.0),
        sigma=r.get("sigma", _float, None, required=True, check=_positive, describe="> 0"),
        chirp=r.get("chirp", _float, 0.0),
    )
    weight = r.get("weight", _complex, 1.0) if with_weight else 1.0
    if values["sigma"] is None:
        return None, weight
    return GaussianSpec(**values), weight


def _read_state(sections, headers, issues, seed):
    entries = sections.get("state", {})
    component_names = sorted(
        (s for s in sections if s.startswith("state.")),
        key=lambda s: (len(s), s),
    )
    r = SectionReader("state", entries, headers.get("state", 1), issues, _STATE_KEYS)
    kind = r.get("kind", _str, "superposition" if component_names else "gaussian")
    if kind not in ("gaussian", "superposition", "hermite"):
        issues.append(Issue(r.line("kind"), f"kind must be gaussian, superposition or hermite (got {kind})"))
        return kind, (), ()
    if "state" not in sections and not component_names:
        issues.append(Issue(1, "missing required section [state]"))
        return kind, (), ()

    if kind == "superposition":
        stray = [k for k in entries if k != "kind"]
        for k in stray:
            issues.append(Issue(r.line(k), f"{k} belongs in a [state.N] component section"))
        if len(component_names) < 2:
            issues.append(Issue(r.header_line, "a superposition needs at least two [state.N] sections"))
        specs, weights = [], []
        for name in component_names:
            cr = SectionReader(name, sections[name], headers[name], issues, _COMPONENT_KEYS)
            spec, weight = _read_gaussian(cr, with_weight=True)
            if spec is not None:
                specs.append(spec)
                weights.append(weight)
        return kind, tuple(specs), tuple(weights)

    for name in component_names:
        issues.append(Issue(headers[name], f"[{name}] requires kind = superposition"))
    if kind == "hermite":
        if "sigma" in entries:
            issues.append(Issue(r.line("sigma"), "sigma is not used by hermite states (use scale)"))
        spec_args = dict(
            seed=seed,
            max_order=r.get("max_order", _int, 6, check=lambda v: 0 <= v <= 64, describe="in [0, 64]"),
            scale=r.get("scale", _float, 1.0, check=_positive, describe="> 0"),
            x0=r.get("x0", _float, 0.0),
            p0=r.get("p0", _float, 0.0),
            chirp=r.get("chirp", _float, 0.0),
        )
        return kind, (HermiteStateSpec(**spec_args),), (1.0,)

    for k in ("max_order", "scale"):
        if k in entries:
            issues.append(Issue(r.line(k), f"{k} is only used by hermite states"))
    spec, _ = _read_gaussian(r)
    return kind, ((spec,) if spec else ()), (1.0,)


def _read_table(path, line, base_dir, issues):
    full = Path(base_dir or ".") / path
    try:
        table = np.loadtxt(full, delimiter=None if full.suffix != ".csv" else ",", ndmin=2)
    except (OSError, ValueError) as exc:
        issues.append(Issue(line, f"cannot read potential table {str(full)!r}: {exc}"))
        return None
    if table.shape[1] != 2 or table.shape[0] < 2:
        issues.append(Issue(line, "potential table must have two columns (x, V) and >= 2 rows"))
        return None
    if not np.all(np.isfinite(table)) or np.any(np.diff(table[:, 0]) <= 0):
        issues.append(Issue(line, "potential table must be finite with strictly increasing x"))
        return None
    return table


def _read_mode(sections, headers, issues, base_dir):
    r = SectionReader("mode", sections.get("mode", {}), headers.get("mode", 1), issues, _MODE_KEYS)
    kind = r.get("kind", _str, "free")
    if kind not in ("free", "harmonic", "table"):
        issues.append(Issue(r.line("kind"), f"mode kind must be free, harmonic or table (got {kind})"))
        kind = "free"
    out = dict(
        mode=FREE if kind == "free" else POTENTIAL,
        potential_name=None if kind == "free" else kind,
        omega=r.get("omega", _float, 1.0, check=_positive, describe="> 0"),
        dt=r.get("dt", _float, 1e-3, check=_positive, describe="> 0"),
        witness=r.get("witness", _bool, kind != "free"),
        table=None,
    )
    if kind == "table":
        path = r.get("table", _str, None, required=True)
        if path is not None:
            out["table"] = _read_table(path, r.line("table"), base_dir, issues)
    elif "table" in r.entries:
        issues.append(Issue(r.line("table"), "table is only used with kind = table"))
    return out


def _read_schedule(sections, headers, issues):
    r = SectionReader("schedule", sections.get("schedule", {}), headers.get("schedule", 1), issues, _SCHEDULE_KEYS)
    if "schedule" not in sections:
        issues.append(Issue(1, "missing required section [schedule]"))
        return None
    t_end = r.get("t_end", _float, None, required=True, check=_positive, describe="> 0")
    n_samples = r.get("n_samples", _int, None, required=True, check=lambda v: v >= 2, describe=">= 2")
    if t_end is None or n_samples is None:
        return None
    return Schedule(t_end, n_samples)


def _read_tolerances(sections, headers, issues, environ):
    tolerances = default_tolerances(environ)
    r = SectionReader("tolerances", sections.get("tolerances", {}), headers.get("tolerances", 1), issues,
                      set(TOLERANCE_DEFAULTS))
    for key in r.entries:
        if key in TOLERANCE_DEFAULTS:
            value = r.get(key, _float, None, check=_positive, describe="> 0")
            if value is not None:
                tolerances[key] = value
    return tolerances


def parse_scenario(text, name=None, base_dir=None, source=None, environ=None):
    """Parse and validate scenario text.

    Raises :class:`ScenarioError` listing every problem found, each with a
    line number. ``name`` is used when the text has no ``name`` key.
    """
    issues = []
    sections, headers = read_sections(text, issues)
    for section in sections:
        base = section.split(".", 1)[0] if section.startswith("state.") else section
        if base not in SCENARIO_SECTIONS:
            issues.append(Issue(headers[section], f"unknown section [{section}]"))

    top = SectionReader("", sections[""], 1, issues, _TOP_KEYS)
    scenario_name = top.get("name", _str, name)
    if not scenario_name:
        issues.append(Issue(1, "scenario needs a nonempty name"))
    seed = top.get("seed", _int, 0, check=lambda v: v >= 0, describe=">= 0")

    consts = _read_constants(sections, headers, issues)
    grid = _read_grid(sections, headers, issues)
    kind, components, weights = _read_state(sections, headers, issues, seed)
    mode = _read_mode(sections, headers, issues, base_dir)
    schedule = _read_schedule(sections, headers, issues)
    tolerances = _read_tolerances(sections, headers, issues, environ)

    if mode["potential_name"] == "table" and grid is None:
        issues.append(Issue(headers.get("grid", headers.get("mode", 1)),
                            "a tabulated potential needs an explicit [grid] (n, x_min, x_max)"))
    if issues:
        issues.sort(key=lambda i: i.line)
        raise ScenarioError(issues)
    return Scenario(
        name=scenario_name,
        consts=consts,
        state_kind=kind,
        components=components,
        weights=weights,
        schedule=schedule,
        grid=grid,
        tolerances=tolerances,
        seed=seed,
        source=source,
        **mode,
    )


def load_scenario(path, environ=None):
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_scenario(text, name=path.stem, base_dir=path.parent, source=str(path), environ=environ)
