"""Named scenarios, each producing one CSV table, and their configuration.

A scenario declares its keys with parsers and defaults. Values are resolved as
command-line flag, then config-file line, then default.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import __version__
from .dynamics import DEFAULT_MEMORY_BUDGET, ExchangeSpec, dephasing_purification, evolve_exchange, to_windowed_fock
from .estimation import (
    HomodyneSignal,
    ParitySignal,
    QuadratureParitySignal,
    analytic_homodyne_sensitivity,
    dicke_moments,
    exact_dicke_stats,
)
from .joint import dephasing_coherence
from .output import CsvTable
from .qfi import qfi_breakdown, qfi_mixed, qfi_purification
from .spin import SpinSpace, angular_momentum_operators, spin_coherent_state
from .states import case_state, husimi_q, jy_distribution, partial_trace_to_probe, purity


class ConfigError(ValueError):
    """Bad scenario name, key or value."""


class NumericInvariantError(ArithmeticError):
    """A computed quantity broke an identity it must satisfy."""


# --------------------------------------------------------------------------
# value parsers

_PI_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """A float, or a multiple of ``pi`` such as ``pi``, ``-0.5pi``, ``2*pi`` or ``pi/2``."""
    text = str(text).strip()
    if text[:1] in "+-" and text[1:].lstrip().startswith("pi"):
        sign = -1.0 if text[0] == "-" else 1.0
        return sign * parse_angle(text[1:])
    m = _PI_RE.match(text)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / den
    return float(text)


def _positive_int(text) -> int:
    value = int(str(text).strip())
    if value < 1:
        raise ValueError("must be at least 1")
    return value


def _non_negative_int(text) -> int:
    value = int(str(text).strip())
    if value < 0:
        raise ValueError("must be non-negative")
    return value


def _non_negative_float(text) -> float:
    value = float(str(text).strip())
    if not value >= 0:
        raise ValueError("must be non-negative")
    return value


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text):
        value = str(text).strip()
        if value not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return value

    return parse


@dataclass(frozen=True)
class Key:
    parse: Callable
    default: object
    help: str


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    values: Mapping[str, object]
    out: str | None = None
    svg: str | None = None
    log_y: bool = False

    def __getitem__(self, key):
        return self.values[key]

    def describe(self) -> list[str]:
        lines = [f"tool = purimetry {__version__}", f"scenario = {self.scenario}"]
        for key in sorted(self.values):
            v = self.values[key]
            lines.append(f"{key} = {v!r}" if isinstance(v, float) else f"{key} = {v}")
        return lines


def normalise_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def read_config_file(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    entries = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        entries[normalise_key(key)] = value.strip()
    return entries


def resolve_config(
    scenario: str,
    flags: Mapping[str, str] | None = None,
    file_values: Mapping[str, str] | None = None,
    out: str | None = None,
    svg: str | None = None,
    log_y: bool = False,
) -> ScenarioConfig:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    spec = SCENARIOS[scenario]
    merged: dict[str, object] = {}
    for source in (file_values or {}, flags or {}):
        for key, text in source.items():
            key = normalise_key(key)
            if key not in spec.keys:
                raise ConfigError(
                    f"unknown key {key!r} for scenario {scenario}; valid keys: {', '.join(sorted(spec.keys))}"
                )
            try:
                merged[key] = spec.keys[key].parse(text)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value {text!r} for {key}: {exc}") from None
    values = {k: merged.get(k, key.default) for k, key in spec.keys.items()}
    config = ScenarioConfig(scenario, values, out, svg, log_y or spec.log_y)
    spec.validate(config)
    return config


# --------------------------------------------------------------------------
# grids and checks


def _grid(lo: float, hi: float, steps: int, scale: str = "lin") -> np.ndarray:
    if steps == 1:
        return np.array([lo])
    if scale == "log":
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _check_range(config, lo_key, hi_key):
    _require(config[lo_key] < config[hi_key], f"{lo_key} must be below {hi_key}")


def _check_convex(f_ab: float, f_a: float):
    if f_ab < f_a - 1e-8 * max(1.0, abs(f_ab)):
        raise NumericInvariantError(f"purification QFI {f_ab!r} fell below probe QFI {f_a!r}")


def _memory_budget(config) -> int:
    return int(config["memory_mb"] * 2**20)


# --------------------------------------------------------------------------
# scenarios


def _cases(config) -> CsvTable:
    space = SpinSpace(config["n"])
    jy = angular_momentum_operators(space).jy
    rows = []
    for label, which in enumerate(("I", "II", "III"), 1):
        rho = case_state(which, space)
        f_ab = qfi_purification(rho, jy)
        f_a = qfi_mixed(rho, jy)
        _check_convex(f_ab, f_a)
        rows.append([label, f_ab, f_a, purity(rho)])
    return CsvTable(("case", "F_AB", "F_A", "purity"), np.array(rows))


def _dephasing_rows(space: SpinSpace, initial: np.ndarray, beta_sq: float, grid: np.ndarray) -> np.ndarray:
    jy = angular_momentum_operators(space).jy
    beta = math.sqrt(beta_sq)
    rows = []
    for gt in grid:
        rho = partial_trace_to_probe(dephasing_purification(initial, beta, gt))
        parts = qfi_breakdown(rho)
        f_a = qfi_mixed(rho, jy)
        _check_convex(parts.total, f_a)
        c1, c2 = dephasing_coherence(np.array([1, 2]), beta_sq, gt)
        rows.append([gt, abs(c1) ** 2, abs(c2) ** 2, purity(rho), parts.f0, parts.f1, parts.f2, f_a, parts.total])
    return np.array(rows)


_DEPHASING_COLUMNS = ("gt", "C1_sq", "C2_sq", "purity", "F0", "F1", "F2", "F_A", "F_AB")


def _dephasing_dicke(config) -> CsvTable:
    space = SpinSpace(config["n"])
    initial = spin_coherent_state(space, math.pi / 2, 0.0)
    grid = _grid(config["gt_min"], config["gt_max"], config["gt_steps"])
    return CsvTable(_DEPHASING_COLUMNS, _dephasing_rows(space, initial, config["beta2"], grid))


def _pseudo_cat(config) -> CsvTable:
    space = SpinSpace(config["n"])
    initial = spin_coherent_state(space, math.pi / 2, math.pi / 2)
    offsets = _grid(-config["gt_halfwidth"], config["gt_halfwidth"], config["gt_steps"])
    if config["gt_steps"] % 2 == 1:
        # land exactly on the centre
        offsets[config["gt_steps"] // 2] = 0.0
    grid = config["gt_center"] + offsets
    return CsvTable(_DEPHASING_COLUMNS, _dephasing_rows(space, initial, config["beta2"], grid))


def _exchange(config) -> CsvTable:
    space = SpinSpace(config["n"])
    jy = angular_momentum_operators(space).jy
    spec = ExchangeSpec.make(config["sign"], config["n_b"], _grid(config["gt_min"], config["gt_max"], config["gt_steps"]))
    rows = []
    half_n2 = space.n_particles**2 / 2
    for snap in evolve_exchange(space, spec):
        f_ab = qfi_purification(snap.rho, jy)
        f_a = qfi_mixed(snap.rho, jy)
        _check_convex(f_ab, f_a)
        rows.append([snap.gt, purity(snap.rho), f_a, f_ab, f_ab / half_n2])
    return CsvTable(("gt", "purity", "F_A", "F_AB", "F_AB_over_half_N2"), np.array(rows))


def _husimi_state(config) -> np.ndarray:
    space = SpinSpace(config["n"])
    state = config["state"]
    if state in ("I", "II", "III"):
        return case_state(state, space)
    if state == "exchange":
        spec = ExchangeSpec.make(config["sign"], config["n_b"], [config["gt"]])
        return evolve_exchange(space, spec)[0].rho
    azimuth = 0.0 if state == "dephasing" else math.pi / 2
    initial = spin_coherent_state(space, math.pi / 2, azimuth)
    return partial_trace_to_probe(dephasing_purification(initial, math.sqrt(config["beta2"]), config["gt"]))


def _husimi(config) -> CsvTable:
    rho = _husimi_state(config)
    if config["table"] == "jy":
        dist = jy_distribution(rho)
        return CsvTable(("Jy", "probability"), np.column_stack([dist.m, dist.probabilities]))
    field_ = husimi_q(rho, config["theta_nodes"], config["phi_nodes"])
    tt, pp = np.meshgrid(field_.theta, field_.phi, indexing="ij")
    return CsvTable(("theta", "phi", "Q"), np.column_stack([tt.ravel(), pp.ravel(), field_.values.ravel()]))


def _phase_grid(config) -> np.ndarray:
    return _grid(config["phase_min"], config["phase_max"], config["phase_steps"], config["phase_scale"])


def _sensitivity_dicke(config) -> CsvTable:
    space = SpinSpace(config["n"])
    beta, gt = math.sqrt(config["beta2"]), config["gt"]
    joint = dephasing_purification(spin_coherent_state(space, math.pi / 2, 0.0), beta, gt)
    windowed = to_windowed_fock(joint, memory_budget=_memory_budget(config))
    signal = HomodyneSignal(windowed, beta, gt)
    moments = dicke_moments(partial_trace_to_probe(joint))
    rows = []
    for phase in _phase_grid(config):
        st = signal.stats(phase)
        rows.append([
            phase,
            st.delta_phi,
            analytic_homodyne_sensitivity(phase, beta, gt, moments),
            exact_dicke_stats(moments, phase).delta_phi,
        ])
    return CsvTable(("phi", "delta_phi", "delta_phi_linearised", "delta_phi_ideal"), np.array(rows))


def _sensitivity_cat(config) -> CsvTable:
    space = SpinSpace(config["n"])
    beta = math.sqrt(config["beta2"])
    joint = dephasing_purification(spin_coherent_state(space, math.pi / 2, math.pi / 2), beta, config["gt"])
    windowed = to_windowed_fock(joint, memory_budget=_memory_budget(config))
    approx = QuadratureParitySignal(windowed, beta)
    exact = ParitySignal(joint)
    rows = []
    for phase in _phase_grid(config):
        rows.append([phase, approx.stats(phase).delta_phi, exact.stats(phase).delta_phi])
    return CsvTable(("phi", "delta_phi", "delta_phi_parity"), np.array(rows))


def _validate_gt_range(config):
    _check_range(config, "gt_min", "gt_max")


def _validate_phase(config):
    _check_range(config, "phase_min", "phase_max")
    if config["phase_scale"] == "log":
        _require(config["phase_min"] > 0, "log phase grid needs phase_min > 0")


def _validate_beta(config):
    _require(config["beta2"] > 0, "beta2 must be positive for this scenario")


@dataclass(frozen=True)
class Scenario:
    name: str
    run: Callable[[ScenarioConfig], CsvTable]
    keys: dict[str, Key]
    plot_x: str
    plot_y: tuple[str, ...]
    log_y: bool = False
    checks: tuple[Callable, ...] = field(default=())
    summary: str = ""

    def validate(self, config: ScenarioConfig):
        for check in self.checks:
            check(config)


def _n(default):
    return Key(_positive_int, default, "number of particles N")


_BETA2 = "mean quanta |beta|^2 of the auxiliary coherent state"
_MEM = Key(_non_negative_float, DEFAULT_MEMORY_BUDGET / 2**20, "Fock-window memory budget in MiB")

SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            "cases",
            _cases,
            {"n": _n(100)},
            "case",
            ("F_AB", "F_A"),
            summary="QFI of the three benchmark probes and of their purifications",
        ),
        Scenario(
            "dephasing-dicke",
            _dephasing_dicke,
            {
                "n": _n(100),
                "beta2": Key(_non_negative_float, 500.0, _BETA2),
                "gt_min": Key(parse_angle, 0.0, "first coupling time"),
                "gt_max": Key(parse_angle, 0.5, "last coupling time"),
                "gt_steps": Key(_positive_int, 501, "number of time samples"),
            },
            "gt",
            ("F_A", "F_AB"),
            checks=(_validate_gt_range,),
            summary="maximal Jx eigenstate dephased by Jz b^dag b",
        ),
        Scenario(
            "husimi",
            _husimi,
            {
                "n": _n(20),
                "state": Key(_choice("I", "II", "III", "dephasing", "pseudo-cat", "exchange"), "I", "which probe state"),
                "table": Key(_choice("q", "jy"), "q", "Husimi grid or Jy projection"),
                "beta2": Key(_non_negative_float, 500.0, _BETA2),
                "gt": Key(parse_angle, 0.0, "coupling time for dynamical states"),
                "n_b": Key(_non_negative_int, 20, "initial auxiliary Fock number (exchange)"),
                "sign": Key(_choice("minus", "plus"), "minus", "exchange Hamiltonian branch"),
                "theta_nodes": Key(_positive_int, 61, "polar grid size"),
                "phi_nodes": Key(_positive_int, 120, "azimuthal grid size"),
            },
            "phi",
            ("Q",),
            summary="Husimi Q on the Bloch sphere, or the Jy projection",
        ),
        Scenario(
            "pseudo-cat",
            _pseudo_cat,
            {
                "n": _n(100),
                "beta2": Key(_non_negative_float, 500.0, _BETA2),
                "gt_center": Key(parse_angle, math.pi, "centre of the time window"),
                "gt_halfwidth": Key(parse_angle, 0.5, "half width of the time window"),
                "gt_steps": Key(_positive_int, 201, "number of time samples"),
            },
            "gt",
            ("F_A", "F_AB"),
            checks=(lambda c: _require(c["gt_halfwidth"] > 0, "gt_halfwidth must be positive"),),
            summary="maximal Jy eigenstate dephased through the gt = pi revival",
        ),
        Scenario(
            "exchange",
            _exchange,
            {
                "n": _n(100),
                "n_b": Key(_non_negative_int, 20, "initial auxiliary Fock number"),
                "sign": Key(_choice("minus", "plus"), "minus", "exchange Hamiltonian branch"),
                "gt_min": Key(parse_angle, 0.0, "first coupling time"),
                "gt_max": Key(parse_angle, 0.6, "last coupling time"),
                "gt_steps": Key(_positive_int, 601, "number of time samples"),
            },
            "gt",
            ("F_A", "F_AB"),
            checks=(_validate_gt_range,),
            summary="|j,j> (x) |N_B> under particle exchange",
        ),
        Scenario(
            "sensitivity-dicke",
            _sensitivity_dicke,
            {
                "n": _n(100),
                "beta2": Key(_non_negative_float, 1e6, _BETA2),
                "gt": Key(parse_angle, 1e-2, "coupling time"),
                "phase_min": Key(parse_angle, 1e-3, "smallest phase"),
                "phase_max": Key(parse_angle, 0.5, "largest phase"),
                "phase_steps": Key(_positive_int, 200, "number of phases"),
                "phase_scale": Key(_choice("log", "lin"), "log", "phase grid spacing"),
                "memory_mb": _MEM,
            },
            "phi",
            ("delta_phi", "delta_phi_linearised"),
            log_y=True,
            checks=(_validate_phase, _validate_beta, lambda c: _require(c["gt"] > 0, "gt must be positive")),
            summary="homodyne readout of a dephased Jx eigenstate",
        ),
        Scenario(
            "sensitivity-cat",
            _sensitivity_cat,
            {
                "n": _n(20),
                "beta2": Key(_non_negative_float, 30.0, _BETA2),
                "gt": Key(parse_angle, math.pi, "coupling time"),
                "phase_min": Key(parse_angle, 0.0, "smallest phase"),
                "phase_max": Key(parse_angle, 0.3, "largest phase"),
                "phase_steps": Key(_positive_int, 301, "number of phases"),
                "phase_scale": Key(_choice("lin", "log"), "lin", "phase grid spacing"),
                "memory_mb": _MEM,
            },
            "phi",
            ("delta_phi",),
            checks=(_validate_phase, _validate_beta),
            summary="amplitude-quadrature parity readout of a pseudo-spin-cat",
        ),
    )
}


def run_scenario(config: ScenarioConfig) -> CsvTable:
    table = SCENARIOS[config.scenario].run(config)
    return CsvTable(table.columns, table.rows, tuple(config.describe()))


def plot_table(config: ScenarioConfig, table: CsvTable) -> CsvTable:
    """Rows to plot; the Husimi grid is cut along the polar node nearest the equator."""
    if config.scenario == "husimi" and config["table"] == "q":
        theta = table.column("theta")
        nodes = np.unique(theta)
        equator = nodes[np.argmin(np.abs(nodes - math.pi / 2))]
        return table.select(theta == equator)
    return table


def plot_columns(config: ScenarioConfig) -> tuple[str, tuple[str, ...]]:
    if config.scenario == "husimi" and config["table"] == "jy":
        return "Jy", ("probability",)
    spec = SCENARIOS[config.scenario]
    return spec.plot_x, spec.plot_y
