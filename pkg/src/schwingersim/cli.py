"""Batch front-end: evolve, bounds, alpha-sweep and compile subcommands.

Each subcommand reads one JSON config, writes delimited data plus a rendered
figure into --out, and echoes the fully resolved config (defaults included)
both to a provenance header in every CSV and to config_resolved.json.

Exit codes: 0 success, 2 config error, 3 resource-limit error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as bounds_mod
from . import plotting
from .compiler import circuit_to_text, compile_step, count_gates, verify_circuit
from .model import ModelParams, bare_vacuum, bare_vacuum_index, build_model, model_to_json, symmetry_charge
from .observables import observables_from_state, observables_from_table, post_select
from .pauli import DenseLimitError
from .statevector import exact_trajectory, sample
from .trotter import (
    Ordering,
    TrotterPlan,
    build_step,
    evolve,
    optimize_alpha1,
    random_angle_schedule,
)

EXIT_CONFIG = 2
EXIT_RESOURCE = 3


class ConfigError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err


def _model_from_config(cfg: dict) -> ModelParams:
    block = cfg.get("model", {})
    try:
        return ModelParams(
            n_sites=int(block.get("n_sites", 4)),
            x=float(block.get("x", 0.6)),
            mu=float(block.get("mu", 0.1)),
        )
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad model parameters: {err}") from err


def _plan_from_config(cfg: dict, seed: int) -> TrotterPlan:
    block = dict(cfg.get("plan", {}))
    try:
        dt = float(block.get("dt", 1.0))
        if not dt > 0:
            raise ConfigError(f"dt must be positive, got {dt}")
        steps = block.get("steps")
        total = block.get("time")
        if steps is None and total is not None:
            steps = round(float(total) / dt)
            if abs(steps * dt - float(total)) > 1e-12 * max(1.0, abs(float(total))):
                raise ConfigError(f"time {total} is not an integer multiple of dt {dt}")
        if steps is None:
            steps = 10
        protection = block.get("protection")
        if isinstance(protection, dict):
            protection = random_angle_schedule(int(steps), int(protection.get("random", seed)))
        elif protection is not None:
            protection = tuple(float(a) for a in protection)
        return TrotterPlan(
            ordering=Ordering(block.get("ordering", "oe1")),
            order_p=int(block.get("p", 1)),
            dt=dt,
            steps=int(steps),
            protection=protection,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad plan: {err}") from err


def _resolved(cfg: dict, args, extra: dict) -> dict:
    doc = {
        "command": extra.pop("command"),
        "seed": args.seed,
        "shots": args.shots,
        "dense_limit": args.dense_limit,
        **extra,
    }
    doc["config"] = cfg
    return doc


def _provenance_lines(resolved: dict) -> list[str]:
    return [
        "# schwingersim " + resolved["command"],
        "# resolved " + json.dumps(resolved, sort_keys=True, default=str),
    ]


def _write_csv(path: Path, header_lines: list[str], columns: list[str], rows) -> None:
    lines = list(header_lines)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _observable_columns(n: int) -> list[str]:
    return ["time", "p_vac", "nu"] + [f"q_{i}" for i in range(1, n + 1)] + ["leakage"]


def _observable_rows(rows) -> list[list]:
    return [[r.time, r.p_vac, r.nu, *map(float, r.q), r.leakage] for r in rows]


def _projection_strings(cfg: dict, n: int, reference_charge: int) -> tuple[str, ...]:
    requested = cfg.get("projections")
    if not requested:
        return ()
    if requested == "allowed":
        return tuple(
            format(i, f"0{n}b")
            for i in range(1 << n)
            if symmetry_charge(i, n) == reference_charge
        )
    return tuple(str(b) for b in requested)


def cmd_evolve(args) -> int:
    cfg = _load_config(args.config)
    params = _model_from_config(cfg)
    plan = _plan_from_config(cfg, args.seed)
    model = build_model(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    psi0 = bare_vacuum(params)
    vac_index = bare_vacuum_index(params.n_sites)
    reference = symmetry_charge(vac_index, params.n_sites)
    projections = _projection_strings(cfg, params.n_sites, reference)
    times = [plan.dt * k for k in range(plan.steps + 1)]

    trotter_states = evolve(model, psi0, plan, dense_limit=args.dense_limit)
    exact_states = exact_trajectory(model, psi0, times, dense_limit=args.dense_limit)

    variants: dict[str, list] = {
        "exact": [
            observables_from_state(s, psi0, t, reference, projections)
            for s, t in zip(exact_states, times)
        ],
        "trotter": [
            observables_from_state(s, psi0, t, reference, projections)
            for s, t in zip(trotter_states, times)
        ],
    }
    if args.shots is not None:
        sampled_rows = []
        selected_rows = []
        for k, (state, t) in enumerate(zip(trotter_states, times)):
            table = sample(state, args.shots, seed=args.seed + k)
            sampled_rows.append(
                observables_from_table(table, vac_index, t, reference, projections)
            )
            selected_rows.append(
                observables_from_table(
                    post_select(table, reference), vac_index, t, reference, projections
                )
            )
        variants["sampled"] = sampled_rows
        variants["postselected"] = selected_rows

    resolved = _resolved(
        cfg,
        args,
        {
            "command": "evolve",
            "model": vars(params),
            "plan": {
                "ordering": plan.ordering.value,
                "p": plan.order_p,
                "dt": plan.dt,
                "steps": plan.steps,
                "protection": list(plan.protection) if plan.protection else None,
            },
            "projections": list(projections),
        },
    )
    header = _provenance_lines(resolved)
    (out / "config_resolved.json").write_text(json.dumps(resolved, indent=2, default=str) + "\n")
    (out / "model.json").write_text(model_to_json(model) + "\n")

    columns = _observable_columns(params.n_sites)
    for variant, rows in variants.items():
        _write_csv(out / f"observables_{variant}.csv", header, columns, _observable_rows(rows))
        if projections:
            proj_rows = [
                [r.time, b, r.projections[b]] for r in rows for b in projections
            ]
            _write_csv(
                out / f"projections_{variant}.csv",
                header,
                ["time", "bitstring", "probability"],
                proj_rows,
            )
    plotting.save_evolve_figure(variants, out / "evolve.png")
    return 0


def cmd_bounds(args) -> int:
    cfg = _load_config(args.config)
    block = cfg.get("model", {})
    n_list = [int(n) for n in cfg.get("n_list", [4, 6, 8, 10])]
    for n in n_list:
        if n % 2 != 0:
            raise ConfigError(f"n_list entries must be even, got {n}")
    epsilon = float(cfg.get("epsilon", 0.01))
    p = int(cfg.get("p", 2))
    t_fixed = cfg.get("time")
    include_empirical = bool(cfg.get("empirical", True))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    reports = []
    for n in n_list:
        params = ModelParams(n, float(block.get("x", 0.6)), float(block.get("mu", 0.1)))
        t = float(t_fixed) if t_fixed is not None else float(n)
        reports.append(
            bounds_mod.evaluate_bounds(
                build_model(params),
                t,
                epsilon,
                p=p,
                include_empirical=include_empirical,
                dense_limit=args.dense_limit,
            )
        )

    resolved = _resolved(
        cfg,
        args,
        {"command": "bounds", "n_list": n_list, "epsilon": epsilon, "p": p},
    )
    header = _provenance_lines(resolved)
    (out / "config_resolved.json").write_text(json.dumps(resolved, indent=2, default=str) + "\n")

    rows = [
        [r.n_sites, r.t, r.epsilon, method, r.steps[method], r.gate_counts[method]]
        for r in reports
        for method in r.steps
    ]
    _write_csv(
        out / "bounds.csv",
        header,
        ["N", "t", "epsilon", "method", "steps", "two_qubit_gates"],
        rows,
    )

    fits = {}
    if len(reports) >= 3:
        for method in reports[0].steps:
            pts = [(r.n_sites, r.gate_counts[method]) for r in reports]
            fits[method] = bounds_mod.scaling_fit(pts)
    fit_doc = [
        {
            "method": method,
            "exponent": exponent,
            "intercept": intercept,
            "r_squared": r2,
        }
        for method, (exponent, intercept, r2) in fits.items()
    ]
    (out / "bounds_fit.json").write_text(json.dumps(fit_doc, indent=2) + "\n")
    plotting.save_bounds_figure(reports, fits, out / "bounds.png")
    return 0


def cmd_alpha_sweep(args) -> int:
    cfg = _load_config(args.config)
    params = _model_from_config(cfg)
    dt = float(cfg.get("plan", {}).get("dt", 1.0))
    t_list = [float(t) for t in cfg.get("t_list", list(range(1, 11)))]
    grid_points = int(cfg.get("grid_points", 4096))
    want_curves = bool(cfg.get("sweep_curves", False))
    model = build_model(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    curves = {}
    for t in t_list:
        if abs(round(t / dt) * dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ConfigError(f"t = {t} is not an integer multiple of dt = {dt}")
        if want_curves:
            alpha, leak, alphas, values = optimize_alpha1(
                model, dt, t, grid_points=grid_points, return_curve=True
            )
            curves[t] = (alphas, values)
        else:
            alpha, leak = optimize_alpha1(model, dt, t, grid_points=grid_points)
        rows.append((t, alpha, leak))

    resolved = _resolved(
        cfg,
        args,
        {
            "command": "alpha-sweep",
            "model": vars(params),
            "dt": dt,
            "t_list": t_list,
            "grid_points": grid_points,
        },
    )
    header = _provenance_lines(resolved)
    (out / "config_resolved.json").write_text(json.dumps(resolved, indent=2, default=str) + "\n")
    _write_csv(out / "alpha_sweep.csv", header, ["t", "alpha1", "leakage"], rows)
    for t, (alphas, values) in curves.items():
        _write_csv(
            out / f"alpha_curve_t{t:g}.csv",
            header,
            ["alpha1", "leakage"],
            zip(map(float, alphas), map(float, values)),
        )
    plotting.save_alpha_sweep_figure(rows, curves, out / "alpha_sweep.png")
    return 0


def cmd_compile(args) -> int:
    cfg = _load_config(args.config)
    params = _model_from_config(cfg)
    plan_block = cfg.get("plan", {})
    dt = float(plan_block.get("dt", 1.0))
    ordering = Ordering(plan_block.get("ordering", "oe1"))
    model = build_model(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    try:
        circuit = compile_step(model, ordering, dt)
    except ValueError as err:
        raise ConfigError(str(err)) from err
    counts = count_gates(circuit)
    deviation = (
        verify_circuit(circuit, build_step(model, ordering, 1, dt), dense_limit=args.dense_limit)
        if params.n_sites <= args.dense_limit
        else None
    )

    resolved = _resolved(
        cfg,
        args,
        {"command": "compile", "model": vars(params), "dt": dt, "ordering": ordering.value},
    )
    (out / "config_resolved.json").write_text(json.dumps(resolved, indent=2, default=str) + "\n")
    (out / "circuit.txt").write_text(circuit_to_text(circuit))
    doc = {
        "n_sites": params.n_sites,
        "dt": dt,
        "counts": {"xx": counts.xx, "r": counts.r, "z": counts.z},
        "verification_deviation": deviation,
    }
    (out / "gate_counts.json").write_text(json.dumps(doc, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schwingersim",
        description="Trotterized dynamics of the purely fermionic lattice Schwinger model",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("evolve", cmd_evolve, "exact and Trotterized trajectories with observables"),
        ("bounds", cmd_bounds, "step-count bounds, empirical search and scaling fits"),
        ("alpha-sweep", cmd_alpha_sweep, "protection-angle optimization per evolution time"),
        ("compile", cmd_compile, "native-gate circuit for one Trotter step"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--out", type=str, required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--shots", type=int, default=None)
        p.add_argument("--dense-limit", type=int, default=12)
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (DenseLimitError, bounds_mod.StepCapError) as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as err:
        # ConfigError and every library validation error
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
