"""Breadth-first walk over a sampled graph.

The walk discovers vertices in size-biased order: a root is drawn with
probability proportional to weight among undiscovered vertices, children
of the vertex being explored are its still-undiscovered neighbours taken
in increasing capacity order, and a fresh root is drawn whenever the queue
empties. The recorded processes:

* lprime: L'_0 = 1, L'_{i+1} = L'_i + c(i+1) - 1. Each strict new minimum
  of L' closes a component.
* l: the reflected version, floored at 1.
* z: Z(i) = L_i - L'_i, the number of closed components so far.

Component boundaries, the spanning-forest parent map, and the list of
surplus (non-forest) edges are recorded alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels, _rng
from .graphgen import GraphSample, _directed_edge_values
from .weights import WeightVector

__all__ = [
    "ExplorationTrace",
    "ComponentStats",
    "InternalConsistencyError",
    "explore",
    "component_stats",
    "l0_trace",
    "largest_component",
    "write_trace_jsonl",
    "write_component_csv",
]


class InternalConsistencyError(RuntimeError):
    """A cross-check between two independent computations disagreed."""


@dataclass(frozen=True)
class ExplorationTrace:
    """Output of one breadth-first walk.

    order[t] is the vertex (0-based) discovered at step t+1; children[t]
    its child count; lprime/l/z have length n+1 and are indexed by step;
    component_bounds are 1-based inclusive (start, end) step intervals;
    surplus_edges are (i, j) order-index pairs with i < j, one per
    non-forest edge; parent maps vertex -> parent vertex (-1 for roots).
    """

    order: np.ndarray
    children: np.ndarray
    lprime: np.ndarray
    l: np.ndarray
    z: np.ndarray
    component_bounds: list[tuple[int, int]]
    surplus_edges: list[tuple[int, int]]
    parent: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order)

    def positions(self) -> np.ndarray:
        """vertex -> 1-based discovery step."""
        pos = np.empty(self.n, dtype=np.int64)
        pos[self.order] = np.arange(1, self.n + 1)
        return pos


@dataclass(frozen=True)
class ComponentStats:
    """One connected component as seen by the walk."""

    size: int
    weight: float
    surplus: int
    start_index: int
    end_index: int


def _exploration_capacities(g: GraphSample, seed: int) -> np.ndarray:
    """Directed per-entry capacities used for child ordering.

    POISSON samples carry coupled capacities. The other models have no
    capacity law, so an i.i.d. uniform order is drawn here; any
    exchangeable order leaves the size-biased order law intact.
    """
    caps = g.directed_capacities()
    if caps is not None:
        return caps
    rng = _rng.generator(seed, _rng.TAG_EXPLORE, 1)
    scale = g.p if (g.p and np.isfinite(g.p) and g.p > 0) else 1.0
    per_edge = rng.uniform(0.0, scale, size=g.m)
    return _directed_edge_values(g.n, g.edge_u, g.edge_v, per_edge, g.indptr, g.indices)


def explore(g: GraphSample, wv: WeightVector, seed: int) -> ExplorationTrace:
    """Run the breadth-first walk of ``g`` and record the full trace."""
    if g.n != wv.n:
        raise ValueError(f"graph has n={g.n} but weight vector has n={wv.n}")
    caps = _exploration_capacities(g, seed)
    seed64 = _rng.kernel_seed(seed, _rng.TAG_EXPLORE, 0)
    order, children, parent, comp_starts, ncomp = _kernels.bfw(
        g.indptr, g.indices, caps, wv.w, seed64
    )
    return _assemble_trace(g, order, children, parent, comp_starts)


def _assemble_trace(g, order, children, parent, comp_starts) -> ExplorationTrace:
    n = len(order)
    lprime = np.empty(n + 1, dtype=np.int64)
    lprime[0] = 1
    np.cumsum(children - 1, out=lprime[1:])
    lprime[1:] += 1
    running_min = np.minimum.accumulate(lprime)
    z = 1 - running_min
    np.maximum(z, 0, out=z)
    l = lprime + z

    starts = [int(s) for s in comp_starts]
    ends = [s - 1 for s in starts[1:]] + [n]
    bounds = list(zip(starts, ends))

    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(1, n + 1)
    pu, pv = pos[g.edge_u], pos[g.edge_v]
    is_tree = (parent[g.edge_u] == g.edge_v) | (parent[g.edge_v] == g.edge_u)
    su = np.minimum(pu, pv)[~is_tree]
    sv = np.maximum(pu, pv)[~is_tree]
    sel = np.lexsort((sv, su))
    surplus = [(int(a), int(b)) for a, b in zip(su[sel], sv[sel])]

    return ExplorationTrace(
        order=order,
        children=children,
        lprime=lprime,
        l=l,
        z=z,
        component_bounds=bounds,
        surplus_edges=surplus,
        parent=parent,
    )


def component_stats(trace: ExplorationTrace, g: GraphSample, wv: WeightVector) -> list[ComponentStats]:
    """Per-component size, weight, surplus and discovery interval.

    Surplus is computed as (internal edge count) - size + 1 from the
    adjacency and cross-checked against the surplus edges counted by the
    walk; disagreement means a bug and raises InternalConsistencyError.
    """
    n = trace.n
    ncomp = len(trace.component_bounds)
    starts = np.fromiter((s for s, _ in trace.component_bounds), dtype=np.int64, count=ncomp)
    ends = np.fromiter((e for _, e in trace.component_bounds), dtype=np.int64, count=ncomp)
    sizes = ends - starts + 1
    comp_id = np.repeat(np.arange(ncomp, dtype=np.int64), sizes)  # by position
    comp_of_vertex = np.empty(n, dtype=np.int64)
    comp_of_vertex[trace.order] = comp_id

    edge_comp = comp_of_vertex[g.edge_u]
    if np.any(edge_comp != comp_of_vertex[g.edge_v]):
        raise InternalConsistencyError("an edge crosses two walk components")
    m_c = np.bincount(edge_comp, minlength=ncomp) if g.m else np.zeros(ncomp, np.int64)
    surplus = m_c - sizes + 1

    surplus_count = np.zeros(ncomp, dtype=np.int64)
    for i, _ in trace.surplus_edges:
        surplus_count[comp_id[i - 1]] += 1
    bad = np.nonzero(surplus != surplus_count)[0]
    if bad.size:
        k = int(bad[0])
        raise InternalConsistencyError(
            f"component {k}: edge-count surplus {int(surplus[k])} != walked surplus {int(surplus_count[k])}"
        )

    comp_weights = np.add.reduceat(wv.w[trace.order], starts - 1)
    return [
        ComponentStats(
            size=int(sizes[k]),
            weight=float(comp_weights[k]),
            surplus=int(surplus[k]),
            start_index=int(starts[k]),
            end_index=int(ends[k]),
        )
        for k in range(ncomp)
    ]


def l0_trace(trace: ExplorationTrace, g: GraphSample) -> np.ndarray:
    """The drift-comparison walk: increment at step i is
    (# neighbours of v(i) with discovery index > i) - 1.

    Always dominates lprime pointwise; unlike lprime it keeps counting
    edges into the discovered-but-unexplored queue.
    """
    pos = trace.positions()
    n = trace.n
    pu, pv = pos[g.edge_u], pos[g.edge_v]
    counts = np.bincount(np.minimum(pu, pv), minlength=n + 1)[1:]
    out = np.empty(n + 1, dtype=np.int64)
    out[0] = 1
    np.cumsum(counts - 1, out=out[1:])
    out[1:] += 1
    return out


def largest_component(stats: list[ComponentStats]) -> tuple[int, ComponentStats]:
    """Largest component by size; ties go to the earliest discovered."""
    if not stats:
        raise ValueError("no components")
    best = max(range(len(stats)), key=lambda k: (stats[k].size, -stats[k].start_index))
    return best, stats[best]


def write_trace_jsonl(trace: ExplorationTrace, path) -> None:
    """One JSON record per step: {i, v, c, lprime, l}."""
    with open(Path(path), "w", encoding="utf-8") as fh:
        for i in range(1, trace.n + 1):
            fh.write(
                json.dumps(
                    {
                        "i": i,
                        "v": int(trace.order[i - 1]),
                        "c": int(trace.children[i - 1]),
                        "lprime": int(trace.lprime[i]),
                        "l": int(trace.l[i]),
                    }
                )
                + "\n"
            )


def write_component_csv(stats: list[ComponentStats], path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write("component_id,size,weight,surplus,start,end\n")
        for k, c in enumerate(stats):
            fh.write(f"{k},{c.size},{c.weight!r},{c.surplus},{c.start_index},{c.end_index}\n")
