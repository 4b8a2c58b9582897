"""Command-line experiment runner.

Subcommands: sample, evaluate, clt, scaling, stabilization, shield-check,
bounds.  Exit codes: 0 success, 2 configuration error, 3 runtime failure;
errors are reported on stderr as a machine-parsable line
``PAIRFUNC_ERROR code=<n> kind=<config|runtime> message="..."``.
The environment variable PAIRFUNC_SEED overrides any configured seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .barcodes import (
    ShieldedBoxConfig,
    inversion_count,
    shield_membership,
    shield_property_check,
    uniform_lifetimes,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    run_experiment,
    stabilization_survey,
    write_outputs,
)
from .geometry import Cube, Window
from .graphs import build_edges, crossing_number, graph_to_text, kernel_from_flag
from .models import MODEL_NAMES, get_model
from .process import MarkModel, dump_configuration, load_configuration, sample_ppp
from .stats import binomial_lower_tail_bound, poisson_upper_tail_bound

__all__ = ["main"]


def _error(kind: str, message: str) -> int:
    code = 2 if kind == "config" else 3
    print(
        f'PAIRFUNC_ERROR code={code} kind={kind} message="{message}"',
        file=sys.stderr,
    )
    return code


def _seed_override(seed: int | None) -> int | None:
    env = os.environ.get("PAIRFUNC_SEED")
    if env is not None:
        return int(env)
    return seed


def _resolve_model(model_id: str, cutoff: float = 1.0):
    try:
        return get_model(model_id, cutoff)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _load_experiment_config(args, defaults: dict) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
        rec = config.canonical()
    else:
        rec = dict(defaults)
    if args.model:
        rec["model"] = args.model
    if args.n_grid:
        rec["n_grid"] = [float(v) for v in args.n_grid.split(",")]
    if args.reps is not None:
        rec["reps"] = args.reps
    if args.seed is not None:
        rec["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        rec["jobs"] = args.jobs
    seed = _seed_override(rec.get("seed"))
    if seed is None:
        raise ConfigError("a seed is required (flag, config file, or PAIRFUNC_SEED)")
    rec["seed"] = seed
    return ExperimentConfig.from_record(rec)



def _config_defaults(args) -> dict:
    """Shared keys (model, seed, d, cutoff, ...) from --config, when given."""
    config = getattr(args, "config", None)
    if not config:
        return {}
    try:
        rec = json.loads(Path(config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {config}: {exc}") from exc
    if not isinstance(rec, dict):
        raise ConfigError("config file must hold a JSON object")
    return rec


def _cmd_sample(args) -> int:
    defaults = _config_defaults(args)
    seed = _seed_override(args.seed if args.seed is not None else defaults.get("seed"))
    if seed is None:
        raise ConfigError("sample needs --seed, a config seed, or PAIRFUNC_SEED")
    model_id = args.model or defaults.get("model")
    model = _resolve_model(model_id) if model_id else None
    window = Window(n=args.n, dim=args.d if args.d is not None else int(defaults.get("d", 2)))
    marks = model.mark_model if model else MarkModel.none()
    cfg = sample_ppp(window, args.intensity, marks, seed)
    text = dump_configuration(cfg)
    if args.format == "json":
        text = json.dumps({"points": len(cfg), "configuration": text}) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_evaluate(args) -> int:
    defaults = _config_defaults(args)
    cfg = load_configuration(Path(args.points).read_text())
    cutoff = args.cutoff if args.cutoff is not None else float(defaults.get("cutoff", 1.0))
    if args.kernel:
        graph = build_edges(cfg, kernel_from_flag(args.kernel), slab_cutoff=cutoff)
        value = crossing_number(graph)
        if args.format == "json":
            print(json.dumps({"kernel": args.kernel, "crossing_number": value}))
        else:
            print(value)
        if args.out:
            Path(args.out).write_text(graph_to_text(graph, points_ref=args.points))
        return 0
    model_id = args.model or defaults.get("model") or "inversion-uniform"
    model = _resolve_model(model_id, cutoff)
    fv = model.evaluate(cfg)
    if args.format == "json":
        line = json.dumps(fv.to_record())
    elif fv.kind == "double_sum":
        value = fv.value
        line = str(int(value) if float(value).is_integer() else value)
    else:
        mant, expo = fv.product_mantissa_exponent()
        line = (
            f"sum_log_sum={fv.value!r} admissible={fv.admissible_count} "
            f"dropped_zero_G={fv.dropped_zero_g} product={mant:.6f}e{expo:+d}"
        )
    print(line)
    if args.out:
        Path(args.out).write_text(line + "\n")
    return 0


def _cmd_clt(args) -> int:
    config = _load_experiment_config(
        args, {"model": "inversion-uniform", "n_grid": [8, 16, 32], "reps": 200, "seed": None}
    )
    record = run_experiment(config)
    paths = write_outputs(record, args.out or "clt-out", args.format)
    for s in record.summaries:
        print(f"n={s.n:g} M={s.count} w1={s.w1:.6f} ks={s.ks:.6f}")
    print(f"written: {', '.join(str(p) for p in paths)}")
    return 0


def _cmd_scaling(args) -> int:
    config = _load_experiment_config(
        args, {"model": "inversion-uniform", "n_grid": [8, 12, 16, 24, 32], "reps": 200, "seed": None}
    )
    record = run_experiment(config)
    paths = write_outputs(record, args.out or "scaling-out", args.format)
    if record.scaling:
        print(f"slope={record.scaling.slope:.6f} stderr={record.scaling.stderr:.6f}")
    print(f"written: {', '.join(str(p) for p in paths)}")
    return 0


def _cmd_stabilization(args) -> int:
    defaults = _config_defaults(args)
    seed = _seed_override(args.seed if args.seed is not None else defaults.get("seed"))
    if seed is None:
        raise ConfigError("stabilization needs --seed, a config seed, or PAIRFUNC_SEED")
    model_id = args.model or defaults.get("model") or "inversion-tree"
    _resolve_model(model_id)
    d = args.d if args.d is not None else int(defaults.get("d", 2))
    survey = stabilization_survey(
        model_id, args.n, args.draws, seed, d=d, with_admissibility=args.admissibility
    )
    rec = survey.to_record()
    if args.format == "csv":
        lines = ["m,survival"] + [f"{m},{s!r}" for m, s in zip(rec["m"], rec["survival"])]
        payload = "\n".join(lines) + "\n"
        print(payload, end="")
        print(f"slope={rec['slope']} r_squared={rec['r_squared']}")
    else:
        payload = json.dumps(rec, indent=1) + "\n"
        print(json.dumps(rec))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        suffix = "csv" if args.format == "csv" else "json"
        (out / f"stabilization.{suffix}").write_text(payload)
    return 0


def _cmd_shield_check(args) -> int:
    rec = json.loads(Path(args.fixture).read_text())
    cfg = load_configuration(rec["configuration"]) if isinstance(
        rec.get("configuration"), str
    ) else load_configuration("\n".join(rec["configuration"]))
    center = tuple(rec["box_center"])
    box = ShieldedBoxConfig.from_configuration(cfg, center)
    member = shield_membership(box)
    insertions = rec.get("insertions")
    if not insertions:
        lo = np.asarray(center) - 1.5
        insertions = [list(lo + 0.75 * k) for k in range(1, 4)]
    prop = member and all(
        shield_property_check(cfg, center, tuple(x), require_membership=False)
        for x in insertions
    )
    if args.format == "json":
        line = json.dumps({"member": member, "property": prop})
    else:
        line = f"member={str(member).lower()}, property={str(prop).lower()}"
    print(line)
    if args.out:
        Path(args.out).write_text(line + "\n")
    return 0 if member and prop else 3


def _cmd_bounds(args) -> int:
    if args.family == "binomial":
        if len(args.params) != 2:
            raise ConfigError("bounds binomial needs: m p")
        value = binomial_lower_tail_bound(int(args.params[0]), float(args.params[1]))
    elif args.family == "poisson":
        if len(args.params) != 1:
            raise ConfigError("bounds poisson needs: ell")
        value = poisson_upper_tail_bound(float(args.params[0]))
    else:
        raise ConfigError(f"unknown bound family {args.family!r}")
    if args.format == "json":
        line = json.dumps({"family": args.family, "params": args.params, "value": value})
    else:
        line = f"{value:.6e}"
    print(line)
    if args.out:
        Path(args.out).write_text(line + "\n")
    return 0


def _add_common(p: argparse.ArgumentParser, default_format: str = "csv") -> None:
    """Flags every subcommand accepts: --config, --seed, --out, --format."""
    p.add_argument("--config", default=None, help="JSON config supplying defaults")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairfunc",
        description="Pair functionals of marked Poisson processes: experiments and checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a Poisson configuration and dump it")
    p.add_argument("--model", default=None, help="model id fixing the mark model")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--intensity", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("evaluate", help="evaluate a functional on a point file")
    p.add_argument("--model", default=None)
    p.add_argument("--points", required=True)
    p.add_argument("--kernel", default=None, help="fixed|directed|max|localized:<cap>")
    p.add_argument("--cutoff", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_evaluate)

    for name, fn in (("clt", _cmd_clt), ("scaling", _cmd_scaling)):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--model", default=None)
        p.add_argument("--n-grid", default=None, help="comma-separated scales")
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        _add_common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("stabilization", help="survey empirical stabilization radii")
    p.add_argument("--model", default=None)
    p.add_argument("--n", type=float, default=24.0)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--admissibility", action="store_true")
    _add_common(p, default_format="json")
    p.set_defaults(func=_cmd_stabilization)

    p = sub.add_parser("shield-check", help="verify a shield fixture")
    p.add_argument("--fixture", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_shield_check)

    p = sub.add_parser("bounds", help="closed-form concentration bounds")
    p.add_argument("family", choices=("binomial", "poisson"))
    p.add_argument("params", nargs="*")
    _add_common(p)
    p.set_defaults(func=_cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        return _error("config", str(exc))
    except (ValueError, KeyError, OSError) as exc:
        return _error("runtime", str(exc))


if __name__ == "__main__":
    sys.exit(main())
