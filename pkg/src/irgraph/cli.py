"""Command-line entry point.

Subcommands: ``gen`` (weights + edge list), ``explore`` (walk traces),
``verify`` (Monte Carlo experiment sweep), ``sbs`` (sampling studies),
``predict`` (closed-form predictions). Every subcommand requires an
explicit --seed (there is no implicit time seed) and echoes its fully
resolved configuration into the output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import explorer, graphgen, harness, sbs, theory, weights as weights_mod
from .graphgen import ModelVariant
from .harness import make_weights


def _fail(parser: argparse.ArgumentParser, message: str):
    parser.error(message)


def _echo_config(out_dir: Path, payload: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _model(name: str) -> ModelVariant:
    return ModelVariant(name)


def _resolve_p(parser, args, wv) -> float:
    if args.f is not None and args.p is not None:
        _fail(parser, "--f and --p are mutually exclusive")
    if args.f is None and args.p is None:
        _fail(parser, "one of --f or --p is required")
    if args.p is not None:
        if args.p <= 0:
            _fail(parser, "--p must be positive")
        return args.p
    return graphgen.critical_p(wv, args.f)


def _add_generation_flags(sp, *, require_n=True, require_weights=True):
    sp.add_argument("--n", type=int, required=require_n, help="number of vertices")
    sp.add_argument("--weights", required=require_weights, default=None,
                    help="pareto:SCALE,SHAPE | const:C | file:PATH | explicit w1,w2,...")
    sp.add_argument("--f", type=float, default=None, help="critical-window offset")
    sp.add_argument("--p", type=float, default=None, help="raw edge parameter (exclusive with --f)")
    sp.add_argument("--model", default="poisson", choices=[m.value for m in ModelVariant])


def cmd_gen(parser, args) -> int:
    out = Path(args.out)
    wv = make_weights(args.weights, args.n, args.seed)
    p = _resolve_p(parser, args, wv)
    g = graphgen.sample_fast(wv, p, _model(args.model), args.seed)
    out.mkdir(parents=True, exist_ok=True)
    weights_mod.save_weights(wv, out / "weights.txt")
    graphgen.write_edgelist(g, out / "edges.csv")
    _echo_config(out, {"command": "gen", "n": args.n, "weights": args.weights,
                       "f": args.f, "p": p, "model": args.model, "seed": args.seed,
                       "out": str(out)})
    print(f"n={wv.n} ell_n={wv.ell_n!r} c_hat={wv.c_hat!r} p={p!r} m={g.m}")
    return 0


def cmd_explore(parser, args) -> int:
    out = Path(args.out)
    if args.graph is not None:
        g = graphgen.read_edgelist(args.graph, n=args.n)
        if args.weights:
            wv = make_weights(args.weights, g.n, args.seed)
        else:
            wv = weights_mod.generate_constant(g.n, 1.0)
        if wv.n != g.n:
            _fail(parser, f"graph has {g.n} vertices but weights have {wv.n}")
    else:
        if args.n is None or args.weights is None:
            _fail(parser, "need --graph, or --n with --weights")
        wv = make_weights(args.weights, args.n, args.seed)
        p = _resolve_p(parser, args, wv)
        g = graphgen.sample_fast(wv, p, _model(args.model), args.seed)
    trace = explorer.explore(g, wv, args.seed)
    stats = explorer.component_stats(trace, g, wv)
    out.mkdir(parents=True, exist_ok=True)
    explorer.write_trace_jsonl(trace, out / "trace.jsonl")
    explorer.write_component_csv(stats, out / "components.csv")
    if args.rescale:
        n = wv.n
        with open(out / "rescaled.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write("t,l_rescaled\n")
            for i in range(n + 1):
                fh.write(f"{i / n ** (2 / 3)!r},{float(trace.l[i]) / n ** (1 / 3)!r}\n")
    _echo_config(out, {"command": "explore", "graph": args.graph, "n": g.n,
                       "weights": args.weights, "f": args.f, "p": args.p,
                       "model": args.model, "seed": args.seed,
                       "rescale": bool(args.rescale), "out": str(out)})
    idx, big = explorer.largest_component(stats)
    print(f"n={g.n} m={g.m} components={len(stats)} "
          f"largest size={big.size} surplus={big.surplus} max_l={int(trace.l.max())}")
    return 0


def cmd_verify(parser, args) -> int:
    f_values = tuple(float(x) for x in args.f_list.split(","))
    config = harness.ExperimentConfig(
        n=args.n,
        weight_spec=args.weights,
        f_values=f_values,
        replications=args.reps,
        master_seed=args.seed,
        model=_model(args.model),
        eps=args.eps,
        eps_prime=args.eps_prime,
        threads=args.threads,
        out_dir=args.out_dir,
    )
    report = harness.run(config)
    for row in report.aggregates["per_f"]:
        ev = row["events"]["giant_size_in_window"]
        print(f"f={row['f']}: size-in-window {ev['successes']}/{ev['trials']} "
              f"median |C1|={row['median_c1_size']}")
    return 0


def cmd_predict(parser, args) -> int:
    wv = make_weights(args.weights, args.n, args.seed)
    pred = theory.predict(wv, args.f, args.eps, args.eps_prime)
    text = pred.to_json()
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "prediction.json").write_text(text + "\n", encoding="utf-8")
        _echo_config(out, {"command": "predict", "n": args.n, "weights": args.weights,
                           "f": args.f, "eps": args.eps, "eps_prime": args.eps_prime,
                           "seed": args.seed, "out": str(out)})
    print(text)
    return 0


def cmd_sbs(parser, args) -> int:
    out = Path(args.out) if args.out else None
    if args.mode == "mean-curve":
        if args.n is None or args.weights is None:
            _fail(parser, "mean-curve needs --n and --weights")
        wv = make_weights(args.weights, args.n, args.seed)
        l_max = args.l_max or max(1, wv.n // 10)
        curve = sbs.mean_curve(wv, l_max, args.rounds, args.seed)
        if out is None:
            _fail(parser, "mean-curve needs --out")
        out.mkdir(parents=True, exist_ok=True)
        curve.write_csv(out / "mean_curve.csv")
        _echo_config(out, {"command": "sbs mean-curve", "n": args.n, "weights": args.weights,
                           "l_max": l_max, "rounds": args.rounds, "seed": args.seed,
                           "out": str(out)})
        print(f"wrote mean_curve.csv with l_max={l_max} rounds={args.rounds}")
        return 0
    if args.mode == "monotone":
        if args.weights is None:
            _fail(parser, "monotone needs --weights")
        w = [float(x) for x in args.weights.split(",")]
        if len(w) > sbs.ENUM_MAX_N:
            _fail(parser, f"monotone is exact-only: n <= {sbs.ENUM_MAX_N}")
        report = sbs.check_monotonicity(w, cap=args.cap)
        payload = {"weights": list(report.weights),
                   "cap": None if math.isinf(report.cap) else report.cap,
                   "ok": report.ok, "violations": report.violations}
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / "monotone.json").write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
            _echo_config(out, {"command": "sbs monotone", "weights": args.weights,
                               "cap": args.cap, "seed": args.seed, "out": str(out)})
        print("pass" if report.ok else f"FAIL: {report.violations}")
        return 0
    # conjecture mode
    if args.weights is not None:
        w = [float(x) for x in args.weights.split(",")]
    else:
        if args.n is None:
            _fail(parser, "conjecture needs --weights or --n")
        if args.n > sbs.CONJECTURE_MAX_N:
            _fail(parser, f"conjecture is exact-only: n <= {sbs.CONJECTURE_MAX_N}")
        rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
        w = (rng.integers(1, 20, size=args.n) / 4.0).tolist()
    if len(w) > sbs.CONJECTURE_MAX_N:
        _fail(parser, f"conjecture is exact-only: n <= {sbs.CONJECTURE_MAX_N}")
    m_max = args.m_max or (len(w) - 1)
    report = sbs.check_conjectures(w, m_max)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        report.write_json(out / "conjecture.json")
        _echo_config(out, {"command": "sbs conjecture", "weights": args.weights,
                           "n": args.n, "m_max": m_max, "seed": args.seed, "out": str(out)})
    held = sum(1 for i in report.instances if i.holds)
    print(f"{held}/{len(report.instances)} instances hold; "
          f"asserted (m<=2 ordered) {'ok' if report.asserted_ok else 'VIOLATED'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate weights and a graph edge list")
    _add_generation_flags(p_gen)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)

    p_exp = sub.add_parser("explore", help="run the breadth-first walk")
    p_exp.add_argument("--graph", default=None, help="edge-list CSV to load instead of sampling")
    _add_generation_flags(p_exp, require_n=False, require_weights=False)
    p_exp.add_argument("--seed", type=int, required=True)
    p_exp.add_argument("--out", required=True)
    p_exp.add_argument("--rescale", action="store_true",
                       help="also emit (i/n^(2/3), L_i/n^(1/3)) pairs")

    p_ver = sub.add_parser("verify", help="Monte Carlo verification sweep")
    p_ver.add_argument("--n", type=int, required=True)
    p_ver.add_argument("--weights", default="pareto:0.6666666666666666,4")
    p_ver.add_argument("--f-list", required=True, help="comma-separated f values")
    p_ver.add_argument("--reps", type=int, required=True)
    p_ver.add_argument("--model", default="poisson", choices=[m.value for m in ModelVariant])
    p_ver.add_argument("--eps", type=float, default=0.5)
    p_ver.add_argument("--eps-prime", type=float, default=0.4)
    p_ver.add_argument("--threads", type=int, default=max(1, os.cpu_count() or 1),
                       help="worker threads (reports are identical for any value)")
    p_ver.add_argument("--seed", type=int, required=True)
    p_ver.add_argument("--out-dir", required=True)

    p_pre = sub.add_parser("predict", help="closed-form component predictions")
    p_pre.add_argument("--n", type=int, required=True)
    p_pre.add_argument("--weights", required=True)
    p_pre.add_argument("--f", type=float, required=True)
    p_pre.add_argument("--eps", type=float, default=0.5)
    p_pre.add_argument("--eps-prime", type=float, default=0.4)
    p_pre.add_argument("--seed", type=int, required=True)
    p_pre.add_argument("--out", default=None)

    p_sbs = sub.add_parser("sbs", help="size-biased sampling studies")
    p_sbs.add_argument("mode", choices=["mean-curve", "monotone", "conjecture"])
    p_sbs.add_argument("--n", type=int, default=None)
    p_sbs.add_argument("--weights", default=None)
    p_sbs.add_argument("--l-max", type=int, default=None)
    p_sbs.add_argument("--rounds", type=int, default=10000)
    p_sbs.add_argument("--cap", type=float, default=math.inf)
    p_sbs.add_argument("--m-max", type=int, default=None)
    p_sbs.add_argument("--seed", type=int, required=True)
    p_sbs.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "explore": cmd_explore,
        "verify": cmd_verify,
        "predict": cmd_predict,
        "sbs": cmd_sbs,
    }
    return handlers[args.command](parser, args)


if __name__ == "__main__":
    sys.exit(main())
