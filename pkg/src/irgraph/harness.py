"""Seeded Monte Carlo experiment runner.

One experiment fixes a weight vector (quenched, drawn once from the master
seed), then for every offset f runs R independent replications of
sample -> explore -> component statistics. Each replication draws its
randomness from the substream SeedSequence([master, TAG_REPLICATION,
f_index, rep_index]), so results are identical for any worker-pool size
and any execution order; rows are sorted by (f_index, rep) before writing.

Event frequencies aggregated per f (with Wilson 95% intervals) follow the
component-structure bounds: the largest component's size/weight windows,
its surplus against the f^3 scale, the size caps for components found
before/after it, their excess caps, the global exploration-height bound,
and a cap on how many components open in the stretch just after the
largest. Constants that the theory leaves unspecified are pinned to the
calibrated values recorded in EVENT_CONSTANTS.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from . import _rng, explorer, graphgen, theory, weights as weights_mod
from .graphgen import ModelVariant
from .weights import WeightVector

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ReplicationRow",
    "run",
    "regime_sweep",
    "decay_fit",
    "wilson_interval",
    "EVENT_CONSTANTS",
]

ROW_FIELDS = [
    "f", "seed", "rep", "c1_size", "c1_weight", "c1_surplus", "c2_size",
    "pre_max_size", "post_max_size", "pre_excess_total", "post_excess_max",
    "n_components", "max_l", "ms",
]

# Calibrated constants for events whose theory bounds carry unspecified
# constants. surplus: c1_surplus <= 20 f^3 / c_hat. small components:
# factor 3 on both the post-giant ell^(2/3)/f cap and the pre-giant
# ell^(2/3)/f^(1-eps) cap. excess caps: 3 f^eps before and after. max_l:
# 10 f^2 ell^(1/3) / C is the explicit early-walk height bound; the tail
# height bound ell^(1/3) and the component-count cap 100 f^2 ell^(1/3)
# come with their stated constants.
EVENT_CONSTANTS = {
    "surplus_factor": 20.0,
    "small_after_factor": 3.0,
    "small_before_factor": 3.0,
    "pre_excess_factor": 3.0,
    "post_excess_factor": 3.0,
    "max_l_factor": 10.0,
    "tail_l_factor": 1.0,
    "component_count_factor": 100.0,
}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    weight_spec: str  # "pareto:SCALE,SHAPE" | "const:C" | "file:PATH"
    f_values: tuple[float, ...]
    replications: int
    master_seed: int
    model: ModelVariant = ModelVariant.POISSON
    eps: float = 0.5
    eps_prime: float = 0.4
    threads: int = 1
    out_dir: str | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.f_values:
            raise ValueError("at least one f value required")
        if not all(math.isfinite(f) for f in self.f_values):
            raise ValueError("f values must be finite")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "weight_spec": self.weight_spec,
            "f_values": list(self.f_values),
            "replications": self.replications,
            "master_seed": self.master_seed,
            "model": self.model.value,
            "eps": self.eps,
            "eps_prime": self.eps_prime,
            "threads": self.threads,
            "out_dir": self.out_dir,
        }


def make_weights(spec: str, n: int, master_seed: int) -> WeightVector:
    """Build the experiment's weight vector from its spec string."""
    kind, _, arg = spec.partition(":")
    if kind == "pareto":
        scale_s, shape_s = arg.split(",")
        return weights_mod.generate_pareto_iid(n, float(scale_s), float(shape_s), master_seed)
    if kind == "const":
        return weights_mod.generate_constant(n, float(arg))
    if kind == "file":
        return weights_mod.load_weights(arg)
    # bare comma list of weights
    vals = [float(x) for x in spec.split(",")]
    return WeightVector.from_values(vals)


@dataclass(frozen=True)
class ReplicationRow:
    f: float
    seed: int
    rep: int
    c1_size: int
    c1_weight: float
    c1_surplus: int
    c2_size: int
    pre_max_size: int
    post_max_size: int
    pre_excess_total: int
    post_excess_max: int
    n_components: int
    max_l: int
    ms: int
    tail_max_l: int  # not part of the CSV schema; used for aggregate events
    post_window_components: int

    def csv_values(self):
        return [self.f, self.seed, self.rep, self.c1_size, repr(self.c1_weight),
                self.c1_surplus, self.c2_size, self.pre_max_size, self.post_max_size,
                self.pre_excess_total, self.post_excess_max, self.n_components,
                self.max_l, self.ms]


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    wv: WeightVector
    rows: list[ReplicationRow]
    aggregates: dict = field(default_factory=dict)

    def rows_for_f(self, f: float) -> list[ReplicationRow]:
        return [r for r in self.rows if r.f == f]

    def write_rows_csv(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(ROW_FIELDS)
            for row in self.rows:
                writer.writerow(row.csv_values())

    def write_aggregate_json(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8") as fh:
            json.dump(self.aggregates, fh, indent=1)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return (lo, hi)


def _replicate(wv: WeightVector, f: float, f_idx: int, rep: int, config: ExperimentConfig) -> ReplicationRow:
    ss = _rng.seed_sequence(config.master_seed, _rng.TAG_REPLICATION, f_idx, rep)
    graph_seed, explore_seed = [int(s) for s in ss.generate_state(2, np.uint64)]
    p = graphgen.critical_p(wv, f)
    g = graphgen.sample_fast(wv, p, config.model, graph_seed)
    trace = explorer.explore(g, wv, explore_seed)
    stats = explorer.component_stats(trace, g, wv)  # recounts every surplus from adjacency
    c1_idx, c1 = explorer.largest_component(stats)

    # conservation re-asserted at aggregation level
    if sum(c.size for c in stats) != wv.n:
        raise explorer.InternalConsistencyError("component sizes do not sum to n")
    if abs(sum(c.weight for c in stats) - wv.ell_n) > 1e-6 * wv.ell_n:
        raise explorer.InternalConsistencyError("component weights do not sum to ell_n")

    sizes = sorted((c.size for c in stats), reverse=True)
    c2_size = sizes[1] if len(sizes) > 1 else 0
    pre = [c for c in stats if c.end_index < c1.start_index]
    post = [c for c in stats if c.start_index > c1.end_index]
    pre_max_size = max((c.size for c in pre), default=0)
    post_max_size = max((c.size for c in post), default=0)
    pre_excess_total = sum(c.surplus for c in pre)
    post_excess_max = max((c.surplus for c in post), default=0)
    tail = trace.l[c1.end_index + 1:]
    tail_max_l = int(tail.max()) if tail.size else 0

    window = 3.0 * f * wv.ell_n ** (2.0 / 3.0) / wv.c_hat
    post_window_components = sum(
        1 for c in post if c.start_index <= c1.end_index + window
    )

    return ReplicationRow(
        f=f,
        seed=graph_seed,
        rep=rep,
        c1_size=c1.size,
        c1_weight=c1.weight,
        c1_surplus=c1.surplus,
        c2_size=c2_size,
        pre_max_size=pre_max_size,
        post_max_size=post_max_size,
        pre_excess_total=pre_excess_total,
        post_excess_max=post_excess_max,
        n_components=len(stats),
        max_l=int(trace.l.max()),
        # wall time cannot survive the byte-identical-rerun contract for the
        # rows CSV; measured timing lives in the aggregate JSON instead
        ms=0,
        tail_max_l=tail_max_l,
        post_window_components=post_window_components,
    )


def _aggregate(config: ExperimentConfig, wv: WeightVector, rows: list[ReplicationRow],
               runtime_ms: dict[float, float]) -> dict:
    ell = wv.ell_n
    c_hat = wv.c_hat
    per_f = []
    for f in config.f_values:
        sub = [r for r in rows if r.f == f]
        R = len(sub)
        pred = theory.predict(wv, f, config.eps, config.eps_prime)
        k = EVENT_CONSTANTS
        bounds = {
            "size_window": pred.giant_size_interval,
            "weight_window": pred.giant_weight_interval,
            "surplus": k["surplus_factor"] * f**3 / c_hat,
            "small_after": k["small_after_factor"] * ell ** (2 / 3) / f,
            "small_before": k["small_before_factor"] * ell ** (2 / 3) / f ** (1.0 - config.eps),
            "pre_excess": k["pre_excess_factor"] * f**config.eps,
            "post_excess": k["post_excess_factor"] * f**config.eps,
            "max_l": k["max_l_factor"] * f**2 * ell ** (1 / 3) / c_hat,
            "tail_l": k["tail_l_factor"] * ell ** (1 / 3),
            "component_count": k["component_count_factor"] * f**2 * ell ** (1 / 3),
        }
        flags = {
            "giant_size_in_window": [bounds["size_window"][0] <= r.c1_size <= bounds["size_window"][1] for r in sub],
            "giant_weight_in_window": [bounds["weight_window"][0] <= r.c1_weight <= bounds["weight_window"][1] for r in sub],
            "giant_surplus_below_scale": [r.c1_surplus <= bounds["surplus"] for r in sub],
            "small_after_ok": [r.post_max_size <= bounds["small_after"] for r in sub],
            "small_before_ok": [r.pre_max_size <= bounds["small_before"] for r in sub],
            "pre_excess_ok": [r.pre_excess_total <= bounds["pre_excess"] for r in sub],
            "post_excess_ok": [r.post_excess_max <= bounds["post_excess"] for r in sub],
            "max_l_ok": [r.max_l <= bounds["max_l"] for r in sub],
            "tail_l_ok": [r.tail_max_l <= bounds["tail_l"] for r in sub],
            "component_count_ok": [r.post_window_components <= bounds["component_count"] for r in sub],
        }
        events = {}
        for name, hits in flags.items():
            good = sum(hits)
            lo, hi = wilson_interval(good, R)
            events[name] = {
                "successes": good, "trials": R, "frequency": good / R if R else float("nan"),
                "wilson95": [lo, hi], "failures": R - good,
            }
        per_f.append({
            "f": f,
            "replications": R,
            "bounds": {kk: (list(v) if isinstance(v, tuple) else v) for kk, v in bounds.items()},
            "events": events,
            "median_c1_size": float(np.median([r.c1_size for r in sub])),
            "median_c1_surplus": float(np.median([r.c1_surplus for r in sub])),
            "mean_c1_size": float(np.mean([r.c1_size for r in sub])),
            "mean_components": float(np.mean([r.n_components for r in sub])),
            "runtime_ms_total": runtime_ms.get(f, 0.0),
        })
    return {
        "config": config.to_dict(),
        "weights": {"n": wv.n, "ell_n": ell, "c_hat": c_hat, "w_max": wv.w_max},
        "event_constants": dict(EVENT_CONSTANTS),
        "per_f": per_f,
    }


def run(config: ExperimentConfig) -> ExperimentReport:
    """Run all replications, aggregate events, optionally write artifacts.

    A failing replication aborts the run with its derivation path printed,
    so the failure can be replayed in isolation.
    """
    wv = make_weights(config.weight_spec, config.n, config.master_seed)
    tasks = [(fi, f, rep) for fi, f in enumerate(config.f_values) for rep in range(config.replications)]

    results: dict[tuple[int, int], ReplicationRow] = {}
    runtime_ms: dict[float, float] = {f: 0.0 for f in config.f_values}

    def work(task):
        fi, f, rep = task
        t0 = time.perf_counter()
        try:
            row = _replicate(wv, f, fi, rep, config)
        except Exception as exc:  # noqa: BLE001 - re-raised with replay info
            raise RuntimeError(
                f"replication failed: f={f} (index {fi}), rep={rep}, "
                f"master_seed={config.master_seed}, substream=({_rng.TAG_REPLICATION}, {fi}, {rep})"
            ) from exc
        return (fi, rep), f, row, (time.perf_counter() - t0) * 1000.0

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(work, tasks))
    else:
        outcomes = [work(task) for task in tasks]
    for key, f, row, elapsed in outcomes:
        results[key] = row
        runtime_ms[f] += elapsed

    rows = [results[key] for key in sorted(results)]
    report = ExperimentReport(config=config, wv=wv, rows=rows)
    report.aggregates = _aggregate(config, wv, rows, runtime_ms)

    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        report.write_rows_csv(out / "rows.csv")
        report.write_aggregate_json(out / "aggregate.json")
        (out / "config.json").write_text(json.dumps(config.to_dict(), indent=1) + "\n", encoding="utf-8")
    return report


# ---------------------------------------------------------------------------
# Phase-transition sweep
# ---------------------------------------------------------------------------


def _component_sizes(g: graphgen.GraphSample) -> np.ndarray:
    data = np.ones(2 * g.m, dtype=np.int8)
    rows = np.concatenate([g.edge_u, g.edge_v])
    cols = np.concatenate([g.edge_v, g.edge_u])
    adj = scipy.sparse.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))
    _, labels = scipy.sparse.csgraph.connected_components(adj, directed=False)
    return np.bincount(labels)


def regime_sweep(n: int, weight_spec: str, c_values, replications: int, seed: int,
                 model: ModelVariant = ModelVariant.POISSON, out_dir=None) -> dict:
    """Largest-component scaling at p = c / ell_n across the c grid.

    The exploration order is irrelevant to |C1|, so this uses a plain
    connected-components pass instead of the walk.
    """
    wv = make_weights(weight_spec, n, seed)
    per_c = []
    for ci, c in enumerate(c_values):
        if c <= 0:
            raise ValueError("c values must be positive")
        p = c / wv.ell_n
        fracs, rescaled, largest = [], [], []
        for rep in range(replications):
            ss = _rng.seed_sequence(seed, _rng.TAG_REPLICATION, ci, rep)
            g_seed = int(ss.generate_state(1, np.uint64)[0])
            g = graphgen.sample_fast(wv, p, model, g_seed)
            sizes = _component_sizes(g)
            c1 = int(sizes.max()) if len(sizes) else 0
            largest.append(c1)
            fracs.append(c1 / n)
            rescaled.append(c1 / n ** (2.0 / 3.0))
        per_c.append({
            "c": float(c),
            "mean_c1_over_n": float(np.mean(fracs)),
            "mean_c1_over_n23": float(np.mean(rescaled)),
            "mean_c1": float(np.mean(largest)),
            "min_c1": int(np.min(largest)),
            "max_c1": int(np.max(largest)),
        })
    means = [row["mean_c1"] for row in per_c]
    report = {
        "n": n,
        "weight_spec": weight_spec,
        "replications": replications,
        "seed": seed,
        "per_c": per_c,
        "ordering_strictly_increasing": all(a < b for a, b in zip(means, means[1:])),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "regime_sweep.json").write_text(json.dumps(report, indent=1) + "\n", encoding="utf-8")
    return report


# ---------------------------------------------------------------------------
# Tail-decay fit
# ---------------------------------------------------------------------------

# Exponent of f in the theoretical failure decay, per event family.
EVENT_DECAY_EXPONENT = {
    "giant_size_in_window": 1.0,
    "giant_weight_in_window": 1.0,
    "giant_surplus_below_scale": 1.0,
    "small_after_ok": 0.5,
    "small_before_ok": 0.5,
    "pre_excess_ok": 0.25,
    "post_excess_ok": 0.5,
    "max_l_ok": 1.0,
    "tail_l_ok": 0.5,
    "component_count_ok": 0.5,
}


def decay_fit(report: ExperimentReport | dict, event: str) -> dict:
    """Least-squares slope of log(failure freq + 1/(2R)) against f^exponent.

    The additive 1/(2R) keeps zero counts finite; when every f has zero
    failures the fit is reported as consistent-but-unresolvable.
    """
    agg = report.aggregates if isinstance(report, ExperimentReport) else report
    per_f = agg["per_f"]
    if len(per_f) < 3:
        raise ValueError("need at least 3 f values for a decay fit")
    exponent = EVENT_DECAY_EXPONENT.get(event, 1.0)
    xs, ys, failures = [], [], []
    for row in per_f:
        ev = row["events"][event]
        R = ev["trials"]
        freq = ev["failures"] / R
        failures.append(ev["failures"])
        xs.append(row["f"] ** exponent)
        ys.append(math.log(freq + 1.0 / (2.0 * R)))
    if all(k == 0 for k in failures):
        return {"event": event, "status": "decay consistent, unresolvable",
                "slope": 0.0, "exponent": exponent, "failures": failures}
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = np.asarray(ys) - (slope * np.asarray(xs) + intercept)
    return {
        "event": event,
        "status": "fit",
        "slope": float(slope),
        "intercept": float(intercept),
        "exponent": exponent,
        "negative_slope": bool(slope < 0),
        "failures": failures,
        "rmse": float(np.sqrt(np.mean(resid**2))),
    }
