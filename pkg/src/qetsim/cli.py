"""Command-line interface: single-point runs, sweeps, figure presets, selfcheck.

Configuration is JSON with blocks ``system``, ``bath_a``, ``bath_b``,
``protocol``, ``sweep``, ``output`` and a top-level
``dissipator_variant``; unknown keys are rejected. Precedence is
flags > file > defaults. Exit codes: 0 success, 2 configuration error,
3 numerical failure. Errors go to stderr as ``error:<kind>: message``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import linalg
from .errors import ConfigError, InvalidParams, QetError, UnknownPreset
from .experiments import (
    GridSpec,
    Scenario,
    SweepRecord,
    figure_preset,
    preset_ids,
    run_sweep,
)
from .protocol import (
    d_coef_half_coherence,
    e_out_closed_form,
    eigenstate_eout,
    simulate_protocol,
)
from .redfield import (
    ReservoirSpec,
    build_liouvillian,
    qet_at_steady_state,
    steady_state,
)
from .system import SystemParams, analytic_spectrum, transition_set

CSV_HEADER = (
    "scenario,axis1_name,axis1,axis2_name,axis2,e_out_max,e_out_theta1,e_out_theta2,"
    "theta_star,D,F,E0,EA,injected,p1,p2,p3,p4,residual,min_eig,gap_ratio,skipped,skip_reason"
)

_RECORD_FIELDS = (
    ("scenario", "scenario"),
    ("axis1_name", "axis1_name"),
    ("axis1", "axis1"),
    ("axis2_name", "axis2_name"),
    ("axis2", "axis2"),
    ("e_out_max", "e_out_max"),
    ("e_out_theta1", "e_out_theta1"),
    ("e_out_theta2", "e_out_theta2"),
    ("theta_star", "theta_star"),
    ("D", "d_coef"),
    ("F", "f_coef"),
    ("E0", "e0"),
    ("EA", "e_a"),
    ("injected", "injected"),
    ("p1", "p1"),
    ("p2", "p2"),
    ("p3", "p3"),
    ("p4", "p4"),
    ("residual", "residual"),
    ("min_eig", "min_eigenvalue"),
    ("gap_ratio", "gap_ratio"),
    ("skipped", "skipped"),
    ("skip_reason", "skip_reason"),
)

_DEFAULT_SYSTEM = {"eps_a": 2.0, "eps_b": 2.0, "kappa": 1.0}
_DEFAULT_BATH = {"statistics": "bose", "T": 1.0, "mu": 0.0, "gamma": 0.05}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_records(records: list[SweepRecord], fmt: str, destination) -> None:
    """Serialize sweep records as CSV (frozen header) or JSON (same field names).

    Floats carry 12 significant digits in CSV; skipped records leave the
    numeric fields empty with the reason populated.
    """
    if not records:
        raise ConfigError("refusing to write an empty record list")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    path = Path(destination)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for record in records:
            writer.writerow([_fmt(getattr(record, attr)) for _, attr in _RECORD_FIELDS])
        path.write_text(buffer.getvalue())
    else:
        payload = [
            {column: getattr(record, attr) for column, attr in _RECORD_FIELDS}
            for record in records
        ]
        path.write_text(json.dumps(payload, indent=2) + "\n")


def read_records(path) -> list[SweepRecord]:
    """Parse a CSV produced by :func:`write_records` back into records."""
    text = Path(path).read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_HEADER.split(","):
        raise ConfigError(f"unexpected CSV header in {path}")
    records = []
    for row in reader:
        values = dict(zip([c for c, _ in _RECORD_FIELDS], row))
        skipped = values["skipped"] == "true"

        def num(column: str) -> float | None:
            return None if values[column] == "" else float(values[column])

        records.append(
            SweepRecord(
                scenario=values["scenario"],
                axis1_name=values["axis1_name"],
                axis1=float(values["axis1"]),
                axis2_name=values["axis2_name"],
                axis2=num("axis2"),
                e_out_max=num("e_out_max"),
                e_out_theta1=num("e_out_theta1"),
                e_out_theta2=num("e_out_theta2"),
                theta_star=num("theta_star"),
                d_coef=num("D"),
                f_coef=num("F"),
                e0=num("E0"),
                e_a=num("EA"),
                injected=num("injected"),
                p1=num("p1"),
                p2=num("p2"),
                p3=num("p3"),
                p4=num("p4"),
                residual=num("residual"),
                min_eigenvalue=num("min_eig"),
                gap_ratio=num("gap_ratio"),
                skipped=skipped,
                skip_reason=values["skip_reason"],
            )
        )
    return records


def _check_keys(block: dict, allowed: tuple[str, ...], context: str) -> None:
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys {unknown} in {context}; allowed: {sorted(allowed)}")


def _bath_from_block(block: dict, context: str) -> ReservoirSpec:
    _check_keys(block, ("statistics", "T", "mu", "gamma"), context)
    merged = {**_DEFAULT_BATH, **block}
    return ReservoirSpec(
        statistics=merged["statistics"],
        temperature=float(merged["T"]),
        mu=float(merged["mu"]),
        gamma=float(merged["gamma"]),
    )


def load_config(path) -> dict:
    """Load and validate the JSON run configuration into plain objects."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(
        raw,
        ("system", "bath_a", "bath_b", "protocol", "sweep", "output", "dissipator_variant"),
        "config root",
    )
    system_block = {**_DEFAULT_SYSTEM, **raw.get("system", {})}
    _check_keys(raw.get("system", {}), ("eps_a", "eps_b", "kappa"), "system block")
    system = SystemParams(
        eps_a=float(system_block["eps_a"]),
        eps_b=float(system_block["eps_b"]),
        kappa=float(system_block["kappa"]),
    )
    bath_a = _bath_from_block(raw.get("bath_a", {}), "bath_a block")
    bath_b = _bath_from_block(raw.get("bath_b", {}), "bath_b block")

    protocol_block = raw.get("protocol", {})
    _check_keys(protocol_block, ("theta_policy", "theta"), "protocol block")
    theta_policy = protocol_block.get("theta_policy", "optimal")
    fixed_theta = protocol_block.get("theta")
    fixed_theta = float(fixed_theta) if fixed_theta is not None else None

    sweep_block = raw.get("sweep")
    axes: tuple[GridSpec, ...] = ()
    sweep_name = "custom"
    if sweep_block is not None:
        _check_keys(sweep_block, ("name", "axes"), "sweep block")
        sweep_name = sweep_block.get("name", "custom")
        axis_specs = sweep_block.get("axes", [])
        if not axis_specs:
            raise ConfigError("sweep block needs at least one axis")
        built = []
        for axis in axis_specs:
            _check_keys(axis, ("name", "min", "max", "steps", "values"), "sweep axis")
            if "name" not in axis:
                raise ConfigError("sweep axis needs a name")
            if "values" in axis:
                built.append(GridSpec(axis["name"], values=tuple(float(v) for v in axis["values"])))
            else:
                built.append(
                    GridSpec(
                        axis["name"],
                        lo=float(axis["min"]),
                        hi=float(axis["max"]),
                        steps=int(axis.get("steps", 101)),
                    )
                )
        axes = tuple(built)

    output_block = raw.get("output", {})
    _check_keys(output_block, ("path", "format"), "output block")
    return {
        "system": system,
        "baths": (bath_a, bath_b),
        "theta_policy": theta_policy,
        "fixed_theta": fixed_theta,
        "sweep_name": sweep_name,
        "axes": axes,
        "output_path": output_block.get("path", "sweep.csv"),
        "output_format": output_block.get("format", "csv"),
        "variant": raw.get("dissipator_variant", "paper"),
    }


def _cmd_spectrum(args) -> int:
    params = SystemParams(args.eps_a, args.eps_b, args.kappa)
    spec = analytic_spectrum(params)
    trans = transition_set(params)
    for label, value in (
        ("E1", spec.energies[0]),
        ("E2", spec.energies[1]),
        ("E3", spec.energies[2]),
        ("E4", spec.energies[3]),
        ("phi1", spec.phi1),
        ("phi2", spec.phi2),
        ("eps_minus", trans.eps_minus),
        ("eps_plus", trans.eps_plus),
    ):
        print(f"{label}={value:.6f}")
    return 0


def _cmd_eout(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        system, baths = cfg["system"], cfg["baths"]
        policy, fixed_theta, variant = cfg["theta_policy"], cfg["fixed_theta"], cfg["variant"]
    else:
        system = SystemParams(args.eps_a, args.eps_b, args.kappa)
        baths = (
            ReservoirSpec(args.statistics, args.t_a, args.mu_a, args.gamma),
            ReservoirSpec(args.statistics, args.t_b, args.mu_b, args.gamma),
        )
        policy, fixed_theta, variant = args.theta_policy, args.theta, args.variant
    steady, result = qet_at_steady_state(system, baths, policy, fixed_theta, variant)
    print("steady state populations (eigenbasis):")
    for i, p in enumerate(steady.populations, start=1):
        print(f"  p{i}={p:.6f}")
    print(f"  residual={steady.residual:.3e} min_eig={steady.min_eigenvalue:.3e} "
          f"gap_ratio={steady.gap_ratio:.3e}")
    print("protocol:")
    print(f"  E0={result.e0:.6f} EA={result.e_a:.6f} EB={result.e_b:.6f}")
    print(f"  injected={result.e_a - result.e0:.6f} E_out={result.e_out:.6f}")
    print(f"  D={result.d_coef:.6f} F={result.f_coef:.6f}")
    print(f"  theta1={result.theta1:.6f} theta2={result.theta2:.6f} "
          f"theta_star={result.theta_star:.6f} E_max={result.e_max:.6f}")
    return 0


def _cmd_eigenstate_eout(args) -> int:
    params = SystemParams(args.eps_a, args.eps_b, args.kappa)
    thetas = np.linspace(0.0, math.pi, args.points)
    print("theta,E_out(E1),E_out(E2),E_out(E3),E_out(E4)")
    for theta in thetas:
        row = [eigenstate_eout(params, k, float(theta)) for k in (1, 2, 3, 4)]
        print(",".join([f"{theta:.6f}"] + [f"{v:.6f}" for v in row]))
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not cfg["axes"]:
        raise ConfigError("config has no sweep block")
    scenario = Scenario(
        name=cfg["sweep_name"],
        base_system=cfg["system"],
        base_baths=cfg["baths"],
        theta_policy=cfg["theta_policy"],
        axes=cfg["axes"],
        fixed_theta=cfg["fixed_theta"],
        dissipator_variant=args.variant or cfg["variant"],
    )
    records = run_sweep(scenario, resolution=args.resolution)
    out_path = args.out or cfg["output_path"]
    out_format = args.format or cfg["output_format"]
    write_records(records, out_format, out_path)
    print(f"wrote {out_path} ({len(records)} rows)")
    return 0


def _cmd_reproduce(args) -> int:
    ids = [args.figure] if args.figure else list(preset_ids())
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for figure_id in ids:
        scenario = figure_preset(figure_id)
        if args.variant:
            scenario = replace(scenario, dissipator_variant=args.variant)
        start = time.perf_counter()
        records = run_sweep(scenario, resolution=args.resolution)
        destination = out_dir / f"{figure_id}.csv"
        write_records(records, "csv", destination)
        print(f"wrote {destination} ({len(records)} rows, {time.perf_counter() - start:.1f}s)")
    return 0


def _selfcheck_lines(seed: int) -> tuple[list[str], bool]:
    rng = np.random.default_rng(seed)
    lines: list[str] = []
    all_ok = True

    def report(name: str, ok: bool, detail: str) -> None:
        nonlocal all_ok
        all_ok = all_ok and ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")

    def random_density() -> np.ndarray:
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real

    params = SystemParams(2.0, 2.0, 1.0)
    worst = 0.0
    for _ in range(200):
        rho = random_density()
        theta = float(rng.uniform(0.0, math.pi))
        result = simulate_protocol(rho, theta, params)
        closed = e_out_closed_form(result.d_coef, result.f_coef, theta)
        worst = max(worst, abs(closed - result.e_out))
    report("closed-form vs operator-algebra E_out", worst < 1e-10, f"max |diff| = {worst:.3e}")

    baths = (ReservoirSpec("bose", 1.0), ReservoirSpec("bose", 1.0))
    worst = 0.0
    for variant in ("paper", "standard"):
        liou = build_liouvillian(params, baths, variant)
        for idx in range(16):
            basis = np.zeros((4, 4), dtype=complex)
            basis[idx // 4, idx % 4] = 1.0
            basis = basis + basis.conj().T
            image = linalg.unstack(liou @ linalg.stack(basis))
            worst = max(worst, abs(np.trace(image)))
    report("generator trace preservation", worst < 1e-12, f"max |trace| = {worst:.3e}")

    steady = steady_state(params, baths)
    liou = build_liouvillian(params, baths)
    worst = 0.0
    for _ in range(3):
        endpoint = linalg.integrate_generator(liou, random_density(), t_max=2000.0, tol=1e-11)
        worst = max(worst, float(np.abs(endpoint - steady.rho_local).max()))
    report("null-space vs propagation steady state", worst < 1e-6, f"max |diff| = {worst:.3e}")

    energies = np.array(analytic_spectrum(params).energies)
    weights = np.exp(-energies / baths[0].temperature)
    weights /= weights.sum()
    gibbs_diff = float(np.abs(np.array(steady.populations) - weights).max())
    report("equilibrium Gibbs populations", gibbs_diff < 2e-3, f"max |diff| = {gibbs_diff:.3e}")

    ground = simulate_protocol(steady.rho_local, 0.0, params)
    alt = d_coef_half_coherence(steady.rho_local, params)
    lines.append(
        "INFO coefficient-convention diagnostic: "
        f"D={ground.d_coef:.6f} vs half-coherence D={alt:.6f} (difference is expected)"
    )
    return lines, all_ok


def _cmd_selfcheck(args) -> int:
    lines, ok = _selfcheck_lines(args.seed)
    for line in lines:
        print(line)
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qetsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_system_flags(p) -> None:
        p.add_argument("--eps-a", type=float, default=2.0)
        p.add_argument("--eps-b", type=float, default=2.0)
        p.add_argument("--kappa", type=float, default=1.0)

    p_spectrum = sub.add_parser("spectrum", help="print energies, mixing angles, transition frequencies")
    add_system_flags(p_spectrum)
    p_spectrum.set_defaults(func=_cmd_spectrum)

    p_eout = sub.add_parser("eout", help="steady state and protocol energies at one parameter point")
    add_system_flags(p_eout)
    p_eout.add_argument("--config", default=None)
    p_eout.add_argument("--statistics", choices=("bose", "fermi"), default="bose")
    p_eout.add_argument("--t-a", type=float, default=1.0)
    p_eout.add_argument("--t-b", type=float, default=1.0)
    p_eout.add_argument("--mu-a", type=float, default=0.0)
    p_eout.add_argument("--mu-b", type=float, default=0.0)
    p_eout.add_argument("--gamma", type=float, default=0.05)
    p_eout.add_argument("--theta-policy", choices=("optimal", "theta1", "theta2", "fixed"), default="optimal")
    p_eout.add_argument("--theta", type=float, default=None)
    p_eout.add_argument("--variant", choices=("paper", "standard"), default="paper")
    p_eout.set_defaults(func=_cmd_eout)

    p_eig = sub.add_parser("eigenstate-eout", help="protocol output of each eigenstate over an angle grid")
    add_system_flags(p_eig)
    p_eig.add_argument("--points", type=int, default=13)
    p_eig.set_defaults(func=_cmd_eigenstate_eout)

    p_sweep = sub.add_parser("sweep", help="run the sweep described by a JSON config")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--format", choices=("csv", "json"), default=None)
    p_sweep.add_argument("--variant", choices=("paper", "standard"), default=None)
    p_sweep.add_argument("--resolution", type=int, default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_rep = sub.add_parser("reproduce", help="run figure presets and write one CSV per preset")
    p_rep.add_argument("--figure", default=None, help="preset id; default runs all presets")
    p_rep.add_argument("--out", default="out")
    p_rep.add_argument("--variant", choices=("paper", "standard"), default=None)
    p_rep.add_argument("--resolution", type=int, default=None)
    p_rep.set_defaults(func=_cmd_reproduce)

    p_check = sub.add_parser("selfcheck", help="run the oracle-equivalence suite")
    p_check.add_argument("--seed", type=int, default=42)
    p_check.set_defaults(func=_cmd_selfcheck)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownPreset, InvalidParams) as exc:
        print(f"error:config: {exc}", file=sys.stderr)
        return 2
    except QetError as exc:
        print(f"error:numerical: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    entry_point()
