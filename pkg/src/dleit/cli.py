"""Scenario runner and figure-reproduction front end.

Each named scenario carries its figure's parameters as immutable defaults,
invokes the library, and emits data tables (CSV and/or NDJSON) plus SVG
verification plots, every file starting with a metadata header (scenario
name, full parameter set, tool version, grid settings).  Outputs contain no
wall-clock timestamps, so running a scenario twice produces byte-identical
files.

CSV: '#'-prefixed metadata lines, a snake_case header row, then rows with
phases in radians; an undefined phase is the literal token `nan`.  NDJSON:
a leading {"meta": ...} object, then one object per row with the same keys
(undefined phases become null, since NaN is not valid JSON).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import PulseSpec, SimGrid, plateau_extract, simulate
from .model import DleitError, ParameterError, SystemParams, canonical_phase
from .optimize import optimize_amplification, optimize_phase_target, sweep
from .phase_analysis import jump_parameters, phase_trace
from .steady_state import eit_exit_ratio, eit_spectrum, propagate_balanced
from .svgplot import PlotSpec, Table, emit_svg

FORMATS = ("csv", "ndjson", "svg")


class UsageError(DleitError, ValueError):
    """Bad command-line input (unknown key, malformed value)."""


@dataclass(frozen=True)
class Scenario:
    """A named run: figure defaults plus recorded user overrides."""

    name: str
    out_dir: Path
    formats: tuple[str, ...] = FORMATS
    overrides: dict = field(default_factory=dict)
    threads: int = 0


@dataclass
class Artifact:
    """One output table and the plots rendered from it (or from a sibling
    wide-format table when the plot needs per-series columns)."""

    name: str
    table: Table
    plots: list = field(default_factory=list)  # (file stem, PlotSpec, Table)
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.12g}"


def _meta_lines(meta: dict) -> list[str]:
    return [f"# {key} = {meta[key]}" for key in sorted(meta)]


def write_csv(path: Path, table: Table, meta: dict) -> None:
    lines = _meta_lines(meta)
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_ndjson(path: Path, table: Table, meta: dict) -> None:
    def clean(v):
        return None if (isinstance(v, float) and math.isnan(v)) else v

    lines = [json.dumps({"meta": meta}, sort_keys=True, default=str)]
    for row in table.rows:
        lines.append(json.dumps({c: clean(v) for c, v in zip(table.columns, row)},
                                sort_keys=True, allow_nan=False))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# scenario builders
# ---------------------------------------------------------------------------

def _response_table(delta: float, alpha: float, n_phi: int, threads: int) -> Table:
    phis = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    rows = []
    for r in sweep([alpha], [delta], phis, regime="balanced", threads=threads):
        rows.append((r.phi_r, r.t_p, r.t_s, r.phi_p, r.phi_s,
                     r.phi_p_unwrapped, r.phi_s_unwrapped))
    return Table(
        columns=("phi_r", "t_p", "t_s", "phi_p", "phi_s",
                 "phi_p_unwrapped", "phi_s_unwrapped"),
        rows=rows,
    )


def _trace_tables(delta: float, alpha: float, trace_phis, n_samples: int):
    """Long-format trace table plus wide tables for the phase-diagram plots."""
    rows = []
    wide_cols = ["zeta"]
    wide_data = None
    for phi in trace_phis:
        tr = phase_trace(phi, delta, alpha, n_samples)
        if wide_data is None:
            wide_data = [tr.zeta]
        tag = f"{phi:.4g}".replace(".", "p").replace("-", "m")
        wide_cols += [f"p_re_{tag}", f"p_im_{tag}", f"s_re_{tag}", f"s_im_{tag}"]
        wide_data += [tr.probe.real, tr.probe.imag, tr.signal.real, tr.signal.imag]
        for k in range(tr.zeta.size):
            rows.append((phi, tr.zeta[k], tr.probe[k].real, tr.probe[k].imag,
                         tr.signal[k].real, tr.signal[k].imag))
    long_table = Table(
        columns=("phi_r", "zeta", "probe_re", "probe_im", "signal_re", "signal_im"),
        rows=rows,
    )
    wide_table = Table(columns=tuple(wide_cols),
                       rows=list(zip(*[np.asarray(c) for c in wide_data])))
    probe_series = tuple((c.replace("p_re", "p_re"), c.replace("p_re", "p_im"),
                          c[5:]) for c in wide_cols if c.startswith("p_re"))
    signal_series = tuple((c, c.replace("s_re", "s_im"), c[5:])
                          for c in wide_cols if c.startswith("s_re"))
    return long_table, wide_table, probe_series, signal_series


def _phase_diagram_scenario(name: str, p: dict, threads: int) -> list[Artifact]:
    delta = p["delta"]
    traces_long, traces_wide, probe_series, signal_series = _trace_tables(
        delta, p["alpha"], p["trace_phis"], int(p["n_samples"]))
    response = _response_table(delta, p["alpha"], int(p["n_phi"]), threads)
    label = name.replace("-", "_")
    artifacts = [
        Artifact(
            name=f"{label}_traces",
            table=traces_long,
            plots=[
                (f"{label}_probe_diagram",
                 PlotSpec(f"{name}: probe phase diagram (delta={delta:g})",
                          "Re", "Im", probe_series), traces_wide),
                (f"{label}_signal_diagram",
                 PlotSpec(f"{name}: signal phase diagram (delta={delta:g})",
                          "Re", "Im", signal_series), traces_wide),
            ],
        ),
        Artifact(
            name=f"{label}_response",
            table=response,
            plots=[
                (f"{label}_transmission",
                 PlotSpec(f"{name}: transmission vs relative phase",
                          "phi_r (rad)", "transmission",
                          (("phi_r", "t_p", "probe"), ("phi_r", "t_s", "signal"))),
                 response),
                (f"{label}_phase",
                 PlotSpec(f"{name}: phase shift vs relative phase",
                          "phi_r (rad)", "phase (rad)",
                          (("phi_r", "phi_p", "probe"), ("phi_r", "phi_s", "signal"))),
                 response),
            ],
        ),
    ]
    if delta != 0.0:
        jp = jump_parameters(delta, 1)
        artifacts[0].meta.update(
            alpha_c=jp.alpha_c, phi_pj=jp.phi_pj, phi_sj=jp.phi_sj)
    return artifacts


def scenario_fig_s2(p: dict, threads: int) -> list[Artifact]:
    return _phase_diagram_scenario("fig-s2", p, threads)


def scenario_fig_s3(p: dict, threads: int) -> list[Artifact]:
    return _phase_diagram_scenario("fig-s3", p, threads)


def scenario_fig_s4(p: dict, threads: int) -> list[Artifact]:
    delta, alpha = p["delta"], p["alpha"]
    jp = jump_parameters(delta, 1)
    rows = []
    wide_cols = ["zeta"]
    wide_data = None
    series = []
    for phi in (p["phi_below"], p["phi_above"]):
        tr = phase_trace(phi, delta, alpha, int(p["n_samples"]))
        pu = tr.probe_phase_unwrapped()
        su = tr.signal_phase_unwrapped()
        if wide_data is None:
            wide_data = [tr.zeta]
        tag = f"{phi:.4g}".replace(".", "p")
        wide_cols += [f"probe_{tag}", f"signal_{tag}"]
        wide_data += [pu, su]
        series += [(wide_cols[0], f"probe_{tag}", f"probe {phi:g}"),
                   (wide_cols[0], f"signal_{tag}", f"signal {phi:g}")]
        for k in range(tr.zeta.size):
            rows.append((phi, tr.zeta[k], abs(tr.probe[k]) ** 2, abs(tr.signal[k]) ** 2,
                         pu[k], su[k]))
    table = Table(
        columns=("phi_r", "zeta", "t_p", "t_s", "phi_p_unwrapped", "phi_s_unwrapped"),
        rows=rows,
    )
    wide = Table(columns=tuple(wide_cols),
                 rows=list(zip(*[np.asarray(c) for c in wide_data])))
    return [Artifact(
        name="fig_s4_jump",
        table=table,
        plots=[("fig_s4_phase_shift",
                PlotSpec("fig-s4: accumulated phase across the jump",
                         "zeta", "phase (rad)", tuple(series)), wide)],
        meta={"alpha_c": jp.alpha_c, "phi_pj": jp.phi_pj, "phi_sj": jp.phi_sj},
    )]


def scenario_fig_s5(p: dict, threads: int) -> list[Artifact]:
    alphas = np.arange(p["alpha_min"], p["alpha_max"] + 0.5 * p["alpha_step"],
                       p["alpha_step"])
    artifacts = []
    xpm_rows = {}
    for target, stem in (("pi", "fig_s5_pi"), ("pi/2", "fig_s5_half_pi")):
        rows = []
        for a in alphas:
            opt = optimize_phase_target(float(a), target).best
            rows.append((opt.alpha, opt.delta, opt.phi_r, opt.t_p,
                         opt.t_p_no_signal, opt.xpm))
            xpm_rows.setdefault(opt.alpha, {})[target] = opt.xpm
        table = Table(
            columns=("alpha", "delta_opt", "phi_r", "t_with", "t_without", "xpm_rad"),
            rows=rows,
        )
        artifacts.append(Artifact(
            name=stem,
            table=table,
            plots=[(f"{stem}_transmission",
                    PlotSpec(f"fig-s5: optimized transmission ({target} target)",
                             "alpha", "transmission",
                             (("alpha", "t_with", "with signal"),
                              ("alpha", "t_without", "without signal"))), table)],
        ))
    xpm_table = Table(
        columns=("alpha", "xpm_pi", "xpm_half_pi"),
        rows=[(a, xpm_rows[a]["pi"], xpm_rows[a]["pi/2"]) for a in sorted(xpm_rows)],
    )
    artifacts.append(Artifact(
        name="fig_s5_xpm",
        table=xpm_table,
        plots=[("fig_s5_xpm",
                PlotSpec("fig-s5: cross-phase modulation vs optical depth",
                         "alpha", "|delta phi| (rad)",
                         (("alpha", "xpm_pi", "pi target"),
                          ("alpha", "xpm_half_pi", "pi/2 target"))), xpm_table)],
    ))
    # inset: pi-target transmission vs detuning at fixed alpha
    from .phase_analysis import TargetInfeasibleError, pi_phase_relative

    inset_rows = []
    for d in np.arange(0.1, p["inset_delta_max"] + 0.05, 0.1):
        try:
            phi_r = pi_phase_relative(p["inset_alpha"], float(d))
            probe, _ = propagate_balanced(phi_r, p["inset_alpha"], float(d))
            inset_rows.append((float(d), abs(probe) ** 2, phi_r, 1.0))
        except TargetInfeasibleError:
            inset_rows.append((float(d), math.nan, math.nan, 0.0))
    inset = Table(columns=("delta", "t_p", "phi_r", "feasible"), rows=inset_rows)
    artifacts.append(Artifact(
        name="fig_s5_inset",
        table=inset,
        plots=[("fig_s5_inset",
                PlotSpec(f"fig-s5 inset: pi-target transmission (alpha={p['inset_alpha']:g})",
                         "delta (Gamma)", "t_p", (("delta", "t_p", "t_p"),)), inset)],
    ))
    return artifacts


def _pulse_artifacts(stem: str, params: SystemParams, phi_r: float, p: dict) -> tuple:
    """Simulate one relative phase; return (artifact, plateau, record)."""
    pulse = PulseSpec(amplitude=p["pulse_amplitude"], t_on=p["t_on"],
                      t_off=p["t_off"], edge_time=p["edge_time"])
    signal_pulse = PulseSpec(amplitude=p["pulse_amplitude"] * np.exp(-1j * phi_r),
                             t_on=p["t_on"], t_off=p["t_off"], edge_time=p["edge_time"])
    grid = SimGrid(t_end=p["t_end"], dt=p["dt"], n_z=int(p["n_z"]))
    record = simulate(params, pulse, signal_pulse, grid,
                      record_stride=int(p["record_stride"]))
    plateau = plateau_extract(record)
    rows = []
    for k, t in enumerate(record.times):
        for j in (0, int(p["n_z"]) - 1):
            rows.append((t, record.zeta[j],
                         record.probe[k, j].real, record.probe[k, j].imag,
                         record.signal[k, j].real, record.signal[k, j].imag))
    table = Table(columns=("t", "zeta", "re_p", "im_p", "re_s", "im_s"), rows=rows)
    amp = abs(p["pulse_amplitude"])
    view_rows = [
        (t, abs(complex(record.probe[k, 0])) / amp,
         abs(complex(record.probe[k, -1])) / amp,
         abs(complex(record.signal[k, -1])) / amp)
        for k, t in enumerate(record.times)
    ]
    view = Table(columns=("t", "input", "probe_out", "signal_out"), rows=view_rows)
    tag = f"{phi_r:.4g}".replace(".", "p")
    artifact = Artifact(
        name=f"{stem}_pulse_phi_{tag}",
        table=table,
        plots=[(f"{stem}_pulse_phi_{tag}",
                PlotSpec(f"{stem}: pulses at phi_r = {phi_r:g}",
                         "t (1/Gamma)", "|Omega| / |Omega(0)|",
                         (("t", "input", "input"),
                          ("t", "probe_out", "probe out"),
                          ("t", "signal_out", "signal out"))), view)],
    )
    return artifact, plateau


def scenario_fig_s6(p: dict, threads: int) -> list[Artifact]:
    alphas = np.arange(p["alpha_min"], p["alpha_max"] + 0.5 * p["alpha_step"],
                       p["alpha_step"])
    rows = []
    for a in alphas:
        opt = optimize_amplification(float(a)).best
        rows.append((opt.alpha, opt.delta, opt.phi_r, opt.t_p, opt.t_s, opt.efficiency))
    amp_table = Table(
        columns=("alpha", "delta_opt", "phi_r_opt", "t_p", "t_s", "efficiency"),
        rows=rows,
    )
    artifacts = [Artifact(
        name="fig_s6_amplification",
        table=amp_table,
        plots=[("fig_s6_amplification",
                PlotSpec("fig-s6(a): optimal signal amplification",
                         "alpha", "transmission / efficiency",
                         (("alpha", "t_p", "t_p"), ("alpha", "t_s", "t_s"),
                          ("alpha", "efficiency", "net gain"))), amp_table)],
    )]
    params = SystemParams(alpha=p["alpha"], delta=p["delta"],
                          omega_c=p["omega_c"], omega_d=p["omega_d"],
                          gamma31=p["gamma31"], gamma41=p["gamma41"],
                          gamma21=p["gamma21"])
    check_rows = []
    worst = 0.0
    for phi_r in (p["phi_probe_max"], p["phi_signal_max"]):
        artifact, plateau = _pulse_artifacts("fig_s6", params, phi_r, p)
        artifacts.append(artifact)
        probe_ref, signal_ref = propagate_balanced(phi_r, p["alpha"], p["delta"])
        t_p_sim = abs(plateau.probe_ratio) ** 2
        t_s_sim = abs(plateau.signal_ratio) ** 2
        err_p = abs(t_p_sim - abs(probe_ref) ** 2) / max(abs(probe_ref) ** 2, 1e-12)
        err_s = abs(t_s_sim - abs(signal_ref) ** 2) / max(abs(signal_ref) ** 2, 1e-12)
        worst = max(worst, err_p, err_s)
        check_rows.append((phi_r, t_p_sim, t_s_sim,
                           abs(probe_ref) ** 2, abs(signal_ref) ** 2, err_p, err_s))
    check = Artifact(
        name="fig_s6_steady_check",
        table=Table(
            columns=("phi_r", "t_p_sim", "t_s_sim", "t_p_analytic", "t_s_analytic",
                     "rel_err_p", "rel_err_s"),
            rows=check_rows,
        ),
        meta={"crosscheck_max_rel_err": f"{worst:.6g}",
              "crosscheck_pass": str(worst < 0.01)},
    )
    artifacts.append(check)
    return artifacts


def scenario_fig_main2(p: dict, threads: int) -> list[Artifact]:
    params = SystemParams(alpha=p["alpha"], delta=0.0, omega_c=p["omega_c"],
                          omega_d=0.0, gamma31=p["gamma31"], gamma41=p["gamma41"],
                          gamma21=p["gamma21"])
    detunings = np.arange(p["dp_min"], p["dp_max"] + 0.5 * p["dp_step"], p["dp_step"])
    spec = eit_spectrum(params, detunings)
    table = Table(columns=("delta_p", "transmission"), rows=[tuple(r) for r in spec])
    g = params.gamma21 * params.gamma31
    line_center = math.exp(-params.alpha * g / (g + abs(params.omega_c) ** 2))
    return [Artifact(
        name="fig_main2_spectrum",
        table=table,
        plots=[("fig_main2_spectrum",
                PlotSpec("fig-main2: EIT transmission spectrum",
                         "probe detuning (Gamma)", "transmission",
                         (("delta_p", "transmission", "T"),)), table)],
        meta={"line_center_closed_form": f"{line_center:.9g}",
              "line_center_model": f"{abs(eit_exit_ratio(params, 0.0)) ** 2:.9g}"},
    )]


def scenario_fig_main3(p: dict, threads: int) -> list[Artifact]:
    params = SystemParams(alpha=p["alpha"], delta=p["delta"],
                          omega_c=p["omega_c"], omega_d=p["omega_d"],
                          gamma31=p["gamma31"], gamma41=p["gamma41"],
                          gamma21=p["gamma21"])
    artifacts = []
    for phi_r in (p["phi_a"], p["phi_b"]):
        artifact, _plateau = _pulse_artifacts("fig_main3", params, phi_r, p)
        artifacts.append(artifact)
    return artifacts


def scenario_fig_main4(p: dict, threads: int) -> list[Artifact]:
    base = SystemParams(alpha=p["alpha"], delta=p["delta"],
                        omega_c=p["omega_c"], omega_d=p["omega_d"],
                        gamma31=p["gamma31"], gamma41=p["gamma41"],
                        gamma21=p["gamma21"])
    phis = np.arange(int(p["n_phi"])) * (2.0 * math.pi / int(p["n_phi"]))
    rows = []
    for r in sweep([p["alpha"]], [p["delta"]], phis, regime="general", base=base,
                   include_no_signal=True, include_xpm=True,
                   n_trace=int(p["n_trace"]), threads=threads):
        rows.append((r.phi_r, r.t_p, r.t_s, r.phi_p, r.phi_s,
                     r.phi_p_unwrapped, r.phi_s_unwrapped,
                     r.t_p_no_signal, r.phi_p_no_signal, r.xpm))
    table = Table(
        columns=("phi_r", "t_p", "t_s", "phi_p", "phi_s", "phi_p_unwrapped",
                 "phi_s_unwrapped", "t_p_no_signal", "phi_p_no_signal", "xpm_rad"),
        rows=rows,
    )
    return [Artifact(
        name="fig_main4_sweep",
        table=table,
        plots=[
            ("fig_main4_transmission",
             PlotSpec("fig-main4: probe transmission vs relative phase",
                      "phi_r (rad)", "transmission",
                      (("phi_r", "t_p", "probe"),
                       ("phi_r", "t_p_no_signal", "no signal"))), table),
            ("fig_main4_phase",
             PlotSpec("fig-main4: probe phase shift vs relative phase",
                      "phi_r (rad)", "phase (rad)",
                      (("phi_r", "phi_p_unwrapped", "probe (unwrapped)"),
                       ("phi_r", "phi_p", "probe (wrapped)"))), table),
        ],
    )]


def scenario_custom(p: dict, threads: int) -> list[Artifact]:
    base = SystemParams(alpha=p["alpha"], delta=p["delta"],
                        omega_c=p["omega_c"], omega_d=p["omega_d"],
                        gamma31=p["gamma31"], gamma41=p["gamma41"],
                        gamma21=p["gamma21"])
    regime = "balanced" if (base.is_closed_form_regime and base.balanced_pumps) else "general"
    rows = []
    for r in sweep([p["alpha"]], [p["delta"]], [p["phi_r"]], regime=regime, base=base,
                   include_no_signal=True, include_xpm=True, n_trace=int(p["n_trace"])):
        rows.append((r.alpha, r.delta, r.phi_r, r.t_p, r.t_s, r.phi_p, r.phi_s,
                     r.phi_p_unwrapped, r.phi_s_unwrapped,
                     r.t_p_no_signal, r.phi_p_no_signal, r.xpm))
    table = Table(
        columns=("alpha", "delta", "phi_r", "t_p", "t_s", "phi_p", "phi_s",
                 "phi_p_unwrapped", "phi_s_unwrapped", "t_p_no_signal",
                 "phi_p_no_signal", "xpm_rad"),
        rows=rows,
    )
    return [Artifact(name="custom_point", table=table, meta={"regime": regime})]


_PI = math.pi
SCENARIOS = {
    "fig-s2": (scenario_fig_s2, {
        "alpha": 100.0, "delta": 0.0, "n_samples": 1001, "n_phi": 629,
        "trace_phis": (1.0, 2.0, 3.0, _PI, 4.0, 5.0, 6.0),
    }),
    "fig-s3": (scenario_fig_s3, {
        "alpha": 100.0, "delta": 16.5, "n_samples": 1001, "n_phi": 629,
        "trace_phis": (1.0, 2.0, 3.0, 4.0, 4.6177, 5.0, 6.0, 1.6654),
    }),
    "fig-s4": (scenario_fig_s4, {
        "alpha": 100.0, "delta": 16.5, "n_samples": 2001,
        "phi_below": 4.57, "phi_above": 4.67,
    }),
    "fig-s5": (scenario_fig_s5, {
        "alpha_min": 10.0, "alpha_max": 100.0, "alpha_step": 5.0,
        "inset_alpha": 100.0, "inset_delta_max": 60.0,
    }),
    "fig-s6": (scenario_fig_s6, {
        "alpha_min": 10.0, "alpha_max": 100.0, "alpha_step": 10.0,
        "alpha": 100.0, "delta": 34.2, "omega_c": 1.0, "omega_d": 1.0,
        "gamma31": 1.0, "gamma41": 1.0, "gamma21": 0.0,
        "phi_probe_max": 1.53, "phi_signal_max": 4.76,
        "pulse_amplitude": 1.0, "t_on": 20.0, "t_off": 520.0, "edge_time": 5.0,
        "t_end": 560.0, "dt": 0.01, "n_z": 200, "record_stride": 20,
    }),
    "fig-main2": (scenario_fig_main2, {
        "alpha": 52.0, "omega_c": 0.7, "gamma31": 1.25, "gamma41": 1.25,
        "gamma21": 0.001, "dp_min": -6.0, "dp_max": 6.0, "dp_step": 0.01,
    }),
    "fig-main3": (scenario_fig_main3, {
        "alpha": 46.0, "delta": 13.0, "omega_c": 0.7, "omega_d": 0.7,
        "gamma31": 1.25, "gamma41": 1.25, "gamma21": 0.001,
        "phi_a": 1.5, "phi_b": 4.5,
        "pulse_amplitude": 1.0, "t_on": 20.0, "t_off": 400.0, "edge_time": 5.0,
        "t_end": 470.0, "dt": 0.02, "n_z": 200, "record_stride": 10,
    }),
    "fig-main4": (scenario_fig_main4, {
        "alpha": 50.0, "delta": 13.0, "omega_c": 0.7, "omega_d": 0.7,
        "gamma31": 1.25, "gamma41": 1.25, "gamma21": 0.001,
        "n_phi": 315, "n_trace": 4096,
    }),
    "custom": (scenario_custom, {
        "alpha": 100.0, "delta": 0.0, "phi_r": 0.0, "omega_c": 1.0, "omega_d": 1.0,
        "gamma31": 1.0, "gamma41": 1.0, "gamma21": 0.0, "n_trace": 4096,
    }),
}


def _parse_value(text: str):
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _apply_overrides(defaults: dict, overrides: dict) -> dict:
    params = dict(defaults)
    for key, value in overrides.items():
        if key not in params:
            raise UsageError(f"unknown override key {key!r}")
        params[key] = value
    return params


def _scalar_meta(scenario: Scenario, params: dict) -> dict:
    meta = {"scenario": scenario.name, "version": __version__}
    for key, value in params.items():
        if isinstance(value, tuple):
            meta[f"param_{key}"] = ";".join(f"{v:g}" for v in value)
        else:
            meta[f"param_{key}"] = value
    if scenario.overrides:
        meta["overrides"] = ";".join(f"{k}={v}" for k, v in sorted(scenario.overrides.items()))
    return meta


def run(scenario: Scenario) -> list[Path]:
    """Execute one scenario; write its files and a summary to stdout."""
    if scenario.name not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario.name!r}")
    for fmt in scenario.formats:
        if fmt not in FORMATS:
            raise UsageError(f"unknown format {fmt!r}")
    builder, defaults = SCENARIOS[scenario.name]
    params = _apply_overrides(defaults, scenario.overrides)
    out_dir = Path(scenario.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise DleitError(f"output directory not writable: {exc}") from exc

    artifacts = builder(params, scenario.threads)
    written: list[Path] = []
    for artifact in artifacts:
        meta = _scalar_meta(scenario, params)
        meta.update(artifact.meta)
        if "csv" in scenario.formats:
            path = out_dir / f"{artifact.name}.csv"
            write_csv(path, artifact.table, meta)
            written.append(path)
        if "ndjson" in scenario.formats:
            path = out_dir / f"{artifact.name}.ndjson"
            write_ndjson(path, artifact.table, meta)
            written.append(path)
        if "svg" in scenario.formats:
            for stem, plot, table in artifact.plots:
                path = out_dir / f"{stem}.svg"
                emit_svg(table, plot, path)
                written.append(path)
        extra = {k: v for k, v in artifact.meta.items()}
        note = f" {extra}" if extra else ""
        print(f"{scenario.name}: {artifact.name} ({len(artifact.table.rows)} rows){note}")
    print(f"{scenario.name}: wrote {len(written)} files to {out_dir}")
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dleit",
        description="Reproduce the double-lambda EIT theory figures as data tables and plots.",
    )
    parser.add_argument("--scenario", required=True, choices=sorted(SCENARIOS),
                        help="named figure scenario (or 'custom')")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--format", default="csv,ndjson,svg",
                        help="comma-separated subset of csv,ndjson,svg")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a scenario parameter (repeatable)")
    parser.add_argument("--threads", type=int, default=0,
                        help="sweep worker threads (0 = auto)")
    args = parser.parse_args(argv)

    overrides = {}
    for item in args.set:
        if "=" not in item:
            print(json.dumps({"error": "usage", "detail": f"bad --set {item!r}"}),
                  file=sys.stderr)
            return 2
        key, _, value = item.partition("=")
        overrides[key.strip()] = _parse_value(value.strip())

    scenario = Scenario(
        name=args.scenario,
        out_dir=Path(args.out),
        formats=tuple(f.strip() for f in args.format.split(",") if f.strip()),
        overrides=overrides,
        threads=args.threads,
    )
    try:
        run(scenario)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "detail": str(exc)}), file=sys.stderr)
        return 2
    except DleitError as exc:
        print(json.dumps({"error": "domain", "detail": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
