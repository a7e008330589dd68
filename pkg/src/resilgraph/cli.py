"""Command-line front end.

Subcommands: stats, attack, purify, surface, stability-check, gcn,
pipeline. Inputs come from edge/feature/label files or an on-the-fly SBM
spec; outputs are JSON/CSV files that are byte-identical across reruns with
the same inputs and seeds. Exit codes: 0 success, 2 usage or input
problems, 1 computation failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .attacks import ATTACK_KINDS, AttackSpec, attack
from .diagnostics import (
    degree_assortativity,
    numerical_rank,
    singular_values,
    smoothness_histogram,
)
from .dynamics import summarize
from .errors import ComputationError, ConfigError, InputError
from .gcn import TrainConfig, evaluate, make_split, train
from .graph_core import (
    DISTINCTION_METRICS,
    SbmSpec,
    generate_sbm,
    load_graph,
    save_graph,
)
from .purify import PurifyConfig, purify
from .stability import (
    GeneralSystem,
    sector_intervals,
    surface_sweep,
    theorem1_check,
)

ENV_OUT_ROOT = "RESILGRAPH_OUT_ROOT"

# fixed per-stage seed offsets from the global seed
SEED_OFFSET_ATTACK = 1
SEED_OFFSET_SPLIT = 2
SEED_OFFSET_TRAIN = 3
# pipeline repetitions stride their base seed so stage seeds never collide
SEED_STRIDE_REPEAT = 10

MEASURED_RAPS = tuple((3 * k) / 100 for k in range(1, 11))


def _fmt(x):
    return repr(float(x))


def _resolve_out(path_str):
    """Relative output paths land under $RESILGRAPH_OUT_ROOT when it is set."""
    p = Path(path_str)
    root = os.environ.get(ENV_OUT_ROOT)
    if root and not p.is_absolute():
        p = Path(root) / p
    p.mkdir(parents=True, exist_ok=True)
    return p


def _json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write_json(path, obj):
    Path(path).write_text(_json_text(obj), encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _witness_json(value):
    if value is None:
        return None
    if math.isinf(value):
        return "inf"
    return float(value)


def _verdict_dict(verdict):
    return {
        "hurwitz": verdict.hurwitz,
        "eigen_condition": verdict.eigen_condition,
        "spr": verdict.spr,
        "spr_witness": _witness_json(verdict.spr_witness),
        "chi_used": list(verdict.chi_used),
        "overall": verdict.overall,
    }


# ---------------------------------------------------------------------------
# graph sources


def _parse_kv_spec(text, what):
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"bad {what} entry {part!r}; expected key=value")
        key, value = (s.strip() for s in part.split("=", 1))
        if key in out:
            raise ConfigError(f"duplicate {what} key {key!r}")
        out[key] = value
    return out


_SBM_FIELDS = {
    "n": int,
    "classes": int,
    "p_in": float,
    "p_out": float,
    "feature_dim": int,
    "feature_noise": float,
    "seed": int,
}


def _parse_sbm_spec(text):
    raw = _parse_kv_spec(text, "sbm spec")
    unknown = set(raw) - set(_SBM_FIELDS)
    if unknown:
        raise ConfigError(f"unknown sbm key(s): {sorted(unknown)}")
    missing = {"n", "classes", "p_in", "p_out"} - set(raw)
    if missing:
        raise ConfigError(f"sbm spec missing required key(s): {sorted(missing)}")
    kwargs = {}
    for key, value in raw.items():
        try:
            kwargs[key] = _SBM_FIELDS[key](value)
        except ValueError:
            raise ConfigError(f"bad value for sbm key {key}: {value!r}") from None
    return SbmSpec(**kwargs)


def _add_graph_args(parser):
    parser.add_argument("--edges", help="edge list file ('u v' lines)")
    parser.add_argument("--features", help="feature CSV (row per node, no header)")
    parser.add_argument("--labels", help="label file ('u label' lines)")
    parser.add_argument(
        "--sbm",
        help="generate instead of loading: n=..,classes=..,p_in=..,p_out=.."
        "[,feature_dim=..,feature_noise=..,seed=..]",
    )


def _graph_from_args(args):
    if args.sbm:
        if args.edges or args.features or args.labels:
            raise ConfigError("give either --sbm or file paths, not both")
        return generate_sbm(_parse_sbm_spec(args.sbm))
    if not args.edges or not args.features:
        raise ConfigError("need --edges and --features (or --sbm)")
    return load_graph(args.edges, args.features, args.labels)


# ---------------------------------------------------------------------------
# subcommands


def cmd_stats(args):
    graph = _graph_from_args(args)
    state = summarize(graph, metric=args.metric)
    hist = smoothness_histogram(graph, metric=args.metric)
    assort = degree_assortativity(graph)
    payload = state.to_dict()
    payload["rank"] = numerical_rank(graph, tol=args.rank_tol)
    payload["deg_assortativity"] = None if assort is None else float(assort)
    payload["smoothness_mean"] = hist.mean
    sys.stdout.write(_json_text(payload))


def cmd_attack(args):
    graph = _graph_from_args(args)
    spec = AttackSpec(
        kind=args.kind,
        rap=args.rap,
        seed=args.seed + SEED_OFFSET_ATTACK,
        dice_delete_fraction=args.delete_fraction,
    )
    attacked, log = attack(graph, spec)
    out = _resolve_out(args.out_dir)
    save_graph(attacked, out / "attacked")
    with open(out / "attack_log.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for entry in log:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    sys.stdout.write(
        _json_text(
            {
                "edges_before": graph.num_edges,
                "edges_after": attacked.num_edges,
                "operations": len(log),
                "out_dir": str(out),
            }
        )
    )


def _purify_config_from_args(args):
    return PurifyConfig(
        alpha=args.alpha,
        w_jaccard=args.w_jaccard,
        w_cosine=args.w_cosine,
        hop=args.hop,
        protect_isolation=not args.allow_isolation,
        metric=args.metric,
    )


def cmd_purify(args):
    graph = _graph_from_args(args)
    purified, report = purify(graph, _purify_config_from_args(args))
    out = _resolve_out(args.out_dir)
    save_graph(purified, out / "purified")
    _write_json(out / "purify_report.json", report.to_dict())
    sys.stdout.write(
        _json_text(
            {
                "edges_before": graph.num_edges,
                "edges_after": purified.num_edges,
                "removed": len(report.removed),
                "restored": len(report.restored),
                "stop_reason": report.stop_reason,
                "out_dir": str(out),
            }
        )
    )


def _parse_grid(text, name):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad {name} grid {text!r}; expected lo:hi:count")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"bad {name} grid {text!r}") from None
        if count < 1:
            raise ConfigError(f"{name} grid count must be >= 1")
        return np.linspace(lo, hi, count)
    try:
        return np.array([float(s) for s in text.split(",") if s.strip()])
    except ValueError:
        raise ConfigError(f"bad {name} grid {text!r}") from None


def _surface_rows_to_csv(rows):
    return [
        (_fmt(r.gamma_r), _fmt(r.gamma_q), _fmt(r.r_star), _fmt(r.q_star), r.status)
        for r in rows
    ]


def cmd_surface(args):
    grs = _parse_grid(args.gamma_r, "gamma_r")
    gqs = _parse_grid(args.gamma_q, "gamma_q")
    out = _resolve_out(args.out_dir)
    modes = ("closed_form", "numeric") if args.mode == "both" else (args.mode,)
    header = "gamma_r,gamma_q,r_star,q_star,status"
    written = []
    for mode in modes:
        rows = surface_sweep(
            args.m, args.c, grs, gqs, theta=args.theta, mode=mode, h=args.h
        )
        path = out / f"surface_{mode}.csv"
        _write_csv(path, header, _surface_rows_to_csv(rows))
        written.append(str(path))

    if args.measured_sbm:
        spec = _parse_sbm_spec(args.measured_sbm)
        clean = generate_sbm(spec)
        rows = []
        for i, rap in enumerate(MEASURED_RAPS):
            aspec = AttackSpec(
                kind=args.measured_kind,
                rap=rap,
                seed=args.measured_seed + i,
                dice_delete_fraction=args.measured_delete_fraction,
            )
            attacked, _ = attack(clean, aspec)
            state = summarize(attacked)
            rows.append(
                (
                    _fmt(rap),
                    _fmt(state.m_avg),
                    _fmt(state.c_avg),
                    _fmt(state.gamma_r_avg),
                    _fmt(state.gamma_q_avg),
                    _fmt(state.r_gra),
                    _fmt(state.q_gra),
                )
            )
        path = out / "measured_points.csv"
        _write_csv(path, "rap,m,c,gamma_r,gamma_q,r_gra,q_gra", rows)
        written.append(str(path))
    sys.stdout.write(_json_text({"written": written}))


def _load_system(path):
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    needed = {"a_mat", "b_mat", "c_mat", "m_diag", "psi_diag"}
    missing = needed - set(raw)
    if missing:
        raise ConfigError(f"{path}: missing system key(s) {sorted(missing)}")
    extra = set(raw) - needed
    if extra:
        raise ConfigError(f"{path}: unknown system key(s) {sorted(extra)}")
    return GeneralSystem(
        a_mat=raw["a_mat"],
        b_mat=raw["b_mat"],
        c_mat=raw["c_mat"],
        m_diag=raw["m_diag"],
        psi_diag=raw["psi_diag"],
    )


def cmd_stability_check(args):
    auto = args.chi == "auto"
    chi = 0.0 if auto else float(args.chi)

    if args.system:
        system = _load_system(args.system)
        verdict = theorem1_check(system, auto_chi=auto)
        sys.stdout.write(_json_text({"system": _verdict_dict(verdict)}))
        return

    for name in ("m", "c", "gamma_r", "gamma_q"):
        if getattr(args, name) is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required without --system")
    sector = sector_intervals(args.theta)
    k_r = args.k_r if args.k_r is not None else sector.k_r_min
    k_q = args.k_q if args.k_q is not None else sector.k_q_min
    if k_r < sector.k_r_min or k_q < sector.k_q_min:
        raise ConfigError(
            f"sector gains below the admissible minimum: need k_r >= {sector.k_r_min}"
            f" and k_q >= {sector.k_q_min}"
        )

    def loop(damping, gain, k_gain):
        system = GeneralSystem(
            a_mat=[[-damping]],
            b_mat=[[gain]],
            c_mat=[[1.0]],
            m_diag=[1.0 / k_gain],
            psi_diag=[chi],
        )
        return theorem1_check(system, auto_chi=auto)

    r_verdict = loop(args.m, args.gamma_q, k_r)
    q_verdict = loop(args.c, args.gamma_r, k_q)
    payload = {
        "sector": {
            "theta": sector.theta,
            "k_r_min": sector.k_r_min,
            "k_q_min": sector.k_q_min,
            "sup_ratio": sector.sup_ratio,
        },
        "r_loop": _verdict_dict(r_verdict),
        "q_loop": _verdict_dict(q_verdict),
        "overall": r_verdict.overall and q_verdict.overall,
    }
    sys.stdout.write(_json_text(payload))


def _history_rows(history):
    return [(str(epoch), _fmt(loss), _fmt(acc)) for epoch, loss, acc in history]


def cmd_gcn(args):
    graph = _graph_from_args(args)
    split = make_split(graph.n, seed=args.seed + SEED_OFFSET_SPLIT)
    config = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        weight_decay=args.weight_decay,
        patience=args.patience,
        seed=args.seed + SEED_OFFSET_TRAIN,
    )
    model, history = train(graph, split, config, hidden=args.hidden)
    metrics = evaluate(model, graph, split)
    out = _resolve_out(args.out_dir)
    _write_csv(out / "history.csv", "epoch,train_loss,val_acc", _history_rows(history))
    payload = {
        "accuracy": metrics,
        "epochs_run": len(history),
        "hidden": args.hidden,
        "seed": args.seed,
    }
    _write_json(out / "metrics.json", payload)
    sys.stdout.write(_json_text(payload))


# ---------------------------------------------------------------------------
# pipeline


_CONFIG_SCHEMA = {
    "data.edges": str,
    "data.features": str,
    "data.labels": str,
    "sbm.n": int,
    "sbm.classes": int,
    "sbm.p_in": float,
    "sbm.p_out": float,
    "sbm.feature_dim": int,
    "sbm.feature_noise": float,
    "attack.kind": str,
    "attack.rap": float,
    "attack.delete_fraction": float,
    "purify.alpha": float,
    "purify.w_jaccard": float,
    "purify.w_cosine": float,
    "purify.hop": int,
    "purify.protect_isolation": bool,
    "purify.metric": str,
    "gcn.hidden": int,
    "gcn.epochs": int,
    "gcn.learning_rate": float,
    "gcn.weight_decay": float,
    "gcn.patience": int,
    "run.seed": int,
    "run.seeds": int,
    "run.out_dir": str,
}

_CONFIG_DEFAULTS = {
    "attack.kind": "dice",
    "attack.rap": 0.25,
    "attack.delete_fraction": 0.5,
    "purify.alpha": 0.85,
    "purify.w_jaccard": 0.3,
    "purify.w_cosine": 0.7,
    "purify.hop": 2,
    "purify.protect_isolation": True,
    "purify.metric": "cosine_distance",
    "gcn.hidden": 16,
    "gcn.epochs": 200,
    "gcn.learning_rate": 0.01,
    "gcn.weight_decay": 5e-4,
    "gcn.patience": 30,
    "run.seed": 0,
    "run.seeds": 1,
}


def _coerce(key, text, lineno, path):
    kind = _CONFIG_SCHEMA[key]
    if kind is bool:
        low = text.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ConfigError(f"{path}: bad boolean for {key}: {text!r} (line {lineno})")
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(
            f"{path}: bad {kind.__name__} for {key}: {text!r} (line {lineno})"
        ) from None


def parse_config(path):
    """Read a 'key = value' config file; '#' starts a comment anywhere."""
    path = Path(path)
    values = dict(_CONFIG_DEFAULTS)
    seen = set()
    text = path.read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: expected 'key = value' (line {lineno})")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_SCHEMA:
            raise ConfigError(f"{path}: unknown key {key!r} (line {lineno})")
        if key in seen:
            raise ConfigError(f"{path}: duplicate key {key!r} (line {lineno})")
        seen.add(key)
        values[key] = _coerce(key, value, lineno, path)

    has_data = any(k in seen for k in ("data.edges", "data.features", "data.labels"))
    has_sbm = any(k.startswith("sbm.") for k in seen)
    if has_data and has_sbm:
        raise ConfigError(f"{path}: give data.* or sbm.*, not both")
    if has_data:
        for key in ("data.edges", "data.features"):
            if key not in seen:
                raise ConfigError(f"{path}: {key} is required with file inputs")
        for key in ("data.edges", "data.features", "data.labels"):
            if key in seen and not Path(values[key]).exists():
                raise ConfigError(f"{path}: {key} points to missing file {values[key]}")
    elif has_sbm:
        for key in ("sbm.n", "sbm.classes", "sbm.p_in", "sbm.p_out"):
            if key not in seen:
                raise ConfigError(f"{path}: {key} is required with sbm inputs")
    else:
        raise ConfigError(f"{path}: configure a data source (data.* or sbm.*)")
    if "run.out_dir" not in seen:
        raise ConfigError(f"{path}: run.out_dir is required")
    if values["attack.kind"] not in ATTACK_KINDS:
        raise ConfigError(f"{path}: unknown attack.kind {values['attack.kind']!r}")
    if values["purify.metric"] not in DISTINCTION_METRICS:
        raise ConfigError(f"{path}: unknown purify.metric {values['purify.metric']!r}")
    return values


def _stage_diagnostics(graph, metric):
    hist = smoothness_histogram(graph, metric=metric)
    assort = degree_assortativity(graph)
    return {
        "edges": graph.num_edges,
        "rank": numerical_rank(graph),
        "deg_assortativity": None if assort is None else float(assort),
        "smoothness_mean": hist.mean,
    }, hist


def _write_stage_csvs(seed_dir, stage, graph, hist):
    sigma = singular_values(graph)
    _write_csv(
        seed_dir / f"spectrum_{stage}.csv",
        "index,sigma",
        [(str(i), _fmt(s)) for i, s in enumerate(sigma)],
    )
    edges = hist.bin_edges
    _write_csv(
        seed_dir / f"smoothness_{stage}.csv",
        "bin_lo,bin_hi,count",
        [
            (_fmt(edges[i]), _fmt(edges[i + 1]), str(int(c)))
            for i, c in enumerate(hist.counts)
        ],
    )


def _pipeline_one_seed(cfg, rep, base_graph, out_root):
    base = cfg["run.seed"] + SEED_STRIDE_REPEAT * rep
    seed_dir = out_root / f"seed_{rep:02d}"
    seed_dir.mkdir(parents=True, exist_ok=True)

    if base_graph is not None:
        clean = base_graph
    else:
        clean = generate_sbm(
            SbmSpec(
                n=cfg["sbm.n"],
                classes=cfg["sbm.classes"],
                p_in=cfg["sbm.p_in"],
                p_out=cfg["sbm.p_out"],
                feature_dim=cfg.get("sbm.feature_dim", 16),
                feature_noise=cfg.get("sbm.feature_noise", 0.1),
                seed=base,
            )
        )

    attacked, log = attack(
        clean,
        AttackSpec(
            kind=cfg["attack.kind"],
            rap=cfg["attack.rap"],
            seed=base + SEED_OFFSET_ATTACK,
            dice_delete_fraction=cfg["attack.delete_fraction"],
        ),
    )
    with open(seed_dir / "attack_log.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for entry in log:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    save_graph(attacked, seed_dir / "attacked")

    purified, report = purify(
        attacked,
        PurifyConfig(
            alpha=cfg["purify.alpha"],
            w_jaccard=cfg["purify.w_jaccard"],
            w_cosine=cfg["purify.w_cosine"],
            hop=cfg["purify.hop"],
            protect_isolation=cfg["purify.protect_isolation"],
            metric=cfg["purify.metric"],
        ),
    )
    save_graph(purified, seed_dir / "purified")
    _write_json(seed_dir / "purify_report.json", report.to_dict())

    metric = cfg["purify.metric"]
    split = make_split(clean.n, seed=base + SEED_OFFSET_SPLIT)
    train_cfg = TrainConfig(
        epochs=cfg["gcn.epochs"],
        learning_rate=cfg["gcn.learning_rate"],
        weight_decay=cfg["gcn.weight_decay"],
        patience=cfg["gcn.patience"],
        seed=base + SEED_OFFSET_TRAIN,
    )
    diagnostics = {}
    accuracy = {}
    for stage, graph in (("clean", clean), ("attacked", attacked),
                         ("purified", purified)):
        diag, hist = _stage_diagnostics(graph, metric)
        diagnostics[stage] = diag
        _write_stage_csvs(seed_dir, stage, graph, hist)
        model, history = train(graph, split, train_cfg, hidden=cfg["gcn.hidden"])
        _write_csv(
            seed_dir / f"history_{stage}.csv",
            "epoch,train_loss,val_acc",
            _history_rows(history),
        )
        accuracy[stage] = evaluate(model, graph, split)

    _write_json(seed_dir / "diagnostics.json", diagnostics)
    _write_json(seed_dir / "metrics.json", {"accuracy": accuracy, "base_seed": base})
    return {"diagnostics": diagnostics, "accuracy": accuracy, "base_seed": base}


def cmd_pipeline(args):
    cfg = parse_config(args.config)
    out_root = _resolve_out(cfg["run.out_dir"])
    base_graph = None
    if "data.edges" in cfg and cfg.get("data.edges"):
        base_graph = load_graph(
            cfg["data.edges"], cfg["data.features"], cfg.get("data.labels")
        )

    results = {}
    failures = {}
    for rep in range(cfg["run.seeds"]):
        try:
            results[rep] = _pipeline_one_seed(cfg, rep, base_graph, out_root)
        except (InputError, ComputationError) as exc:
            failures[rep] = f"{type(exc).__name__}: {exc}"

    aggregate = {"seeds_ok": len(results), "seeds_failed": len(failures),
                 "failures": {str(k): v for k, v in failures.items()}}
    for stage in ("clean", "attacked", "purified"):
        if results:
            accs = [r["accuracy"][stage]["test"] for r in results.values()]
            ranks = [r["diagnostics"][stage]["rank"] for r in results.values()]
            smooth = [
                r["diagnostics"][stage]["smoothness_mean"] for r in results.values()
            ]
            aggregate[stage] = {
                "test_accuracy_mean": float(np.mean(accs)),
                "test_accuracy_std": float(np.std(accs)),
                "rank_mean": float(np.mean(ranks)),
                "smoothness_mean": float(np.mean(smooth)),
            }
    _write_json(out_root / "aggregate.json", aggregate)
    sys.stdout.write(_json_text(aggregate))
    if failures:
        raise ComputationError(
            f"{len(failures)} of {cfg['run.seeds']} pipeline seed(s) failed"
        )


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="resilgraph",
        description="Graph resilience toolkit: condense, attack, purify, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="condensed state and diagnostics as JSON")
    _add_graph_args(p)
    p.add_argument("--metric", default="cosine_distance", choices=DISTINCTION_METRICS)
    p.add_argument("--rank-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("attack", help="apply a structural attack")
    _add_graph_args(p)
    p.add_argument("--kind", default="dice", choices=ATTACK_KINDS)
    p.add_argument("--rap", type=float, required=True,
                   help="budget as a fraction of the edge count")
    p.add_argument("--seed", type=int, default=0, help="global seed")
    p.add_argument("--delete-fraction", type=float, default=0.5)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("purify", help="similarity-guided edge pruning")
    _add_graph_args(p)
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--w-jaccard", type=float, default=0.3)
    p.add_argument("--w-cosine", type=float, default=0.7)
    p.add_argument("--hop", type=int, default=2)
    p.add_argument("--allow-isolation", action="store_true",
                   help="disable the isolation safeguard")
    p.add_argument("--metric", default="cosine_distance", choices=DISTINCTION_METRICS)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("surface", help="equilibrium surface over a gain grid")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--gamma-r", required=True, help="grid: lo:hi:count or v1,v2,..")
    p.add_argument("--gamma-q", required=True, help="grid: lo:hi:count or v1,v2,..")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--mode", default="both",
                   choices=("closed_form", "numeric", "both"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--measured-sbm",
                   help="also emit measured trajectory points from this sbm spec")
    p.add_argument("--measured-kind", default="dice", choices=ATTACK_KINDS)
    p.add_argument("--measured-seed", type=int, default=0)
    p.add_argument("--measured-delete-fraction", type=float, default=0.5)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("stability-check", help="interconnection stability verdicts")
    p.add_argument("--system", help="JSON file with a_mat,b_mat,c_mat,m_diag,psi_diag")
    p.add_argument("--m", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--gamma-r", type=float, dest="gamma_r")
    p.add_argument("--gamma-q", type=float, dest="gamma_q")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--k-r", type=float, help="sector gain override (default 1/theta)")
    p.add_argument("--k-q", type=float, help="sector gain override (default theta)")
    p.add_argument("--chi", default="0.0", help="multiplier value, or 'auto'")
    p.set_defaults(func=cmd_stability_check)

    p = sub.add_parser("gcn", help="train and evaluate the node classifier")
    _add_graph_args(p)
    p.add_argument("--seed", type=int, default=0, help="global seed")
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--weight-decay", type=float, default=5e-4)
    p.add_argument("--patience", type=int, default=30)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gcn)

    p = sub.add_parser("pipeline", help="attack -> purify -> diagnose -> train")
    p.add_argument("--config", required=True, help="'key = value' config file")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
