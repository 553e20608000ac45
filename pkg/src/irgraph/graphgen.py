"""Samplers for rank-1 inhomogeneous random graphs.

Three edge-probability models over a common parameter p:

* POISSON   q_ij = 1 - exp(-w_i w_j p); edges carry capacities distributed
            as Exp(w_i w_j) conditioned to be <= p, which couples the graph
            into the increasing family obtained by thresholding a full
            capacity table at p.
* CHUNG_LU  q_ij = min(w_i w_j p, 1): the classical product form with
            s = p * ell_n as the internal scale.
* BDML      q_ij = w_i w_j s / (n + w_i w_j s), again with s = p * ell_n.

Two samplers are provided: a quadratic reference sampler (the oracle) and
an O(n + m) expected-time skip sampler that exploits the descending weight
order. Both are deterministic given their seed.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels, _rng
from .weights import WeightVector

__all__ = [
    "ModelVariant",
    "GraphSample",
    "CapacityMatrix",
    "critical_p",
    "sample_reference",
    "sample_fast",
    "sample_capacity_matrix",
    "threshold_graph",
    "write_edgelist",
    "read_edgelist",
]

REFERENCE_MAX_N = 20000
CAPACITY_MATRIX_MAX_N = 3000


class ModelVariant(enum.Enum):
    POISSON = "poisson"
    CHUNG_LU = "chung_lu"
    BDML = "bdml"

    @property
    def code(self) -> int:
        return {"poisson": _kernels.MODEL_POISSON,
                "chung_lu": _kernels.MODEL_CHUNG_LU,
                "bdml": _kernels.MODEL_BDML}[self.value]


@dataclass(frozen=True)
class GraphSample:
    """A sampled graph in compressed adjacency form.

    ``indptr``/``indices`` hold per-vertex neighbour lists sorted by vertex
    index; every undirected edge appears in both directions. ``edge_u`` /
    ``edge_v`` list each undirected edge once with u < v; ``capacities``
    aligns with them and is None for non-POISSON models (those models have
    no capacity coupling; the exploration draws an exchangeable order
    instead).
    """

    n: int
    p: float
    model: ModelVariant
    indptr: np.ndarray
    indices: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    capacities: np.ndarray | None
    m: int

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def directed_capacities(self) -> np.ndarray | None:
        """Capacities aligned with ``indices`` (each edge twice), or None."""
        if self.capacities is None:
            return None
        return _directed_edge_values(self.n, self.edge_u, self.edge_v, self.capacities, self.indptr, self.indices)

    def validate(self) -> None:
        """Internal-consistency checks; raises AssertionError on breakage."""
        assert self.m == len(self.edge_u) == len(self.edge_v)
        assert int(self.indptr[-1]) == 2 * self.m
        assert np.all(self.edge_u < self.edge_v), "self-loop or unordered edge"
        pairs = self.edge_u.astype(np.int64) * self.n + self.edge_v
        assert len(np.unique(pairs)) == self.m, "duplicate edge"
        if self.capacities is not None:
            assert np.all(self.capacities <= self.p)
            assert np.all(self.capacities > 0)
        for i in range(self.n):
            nb = self.neighbors(i)
            assert np.all(np.diff(nb) > 0), "neighbour list not strictly sorted"


@dataclass(frozen=True)
class CapacityMatrix:
    """Full table of pairwise capacities E_ij ~ Exp(w_i w_j), i < j.

    Thresholding at increasing p yields a nested family of graphs; kept
    in memory only (never serialized) and limited to small n.
    """

    n: int
    table: np.ndarray  # (n, n), strictly upper triangular entries are the draws


def critical_p(wv: WeightVector, f: float) -> float:
    """Edge parameter (ell^(1/3) + f) / ell^(4/3), the critical window at offset f."""
    ell = wv.ell_n
    if ell <= 0.0:
        raise ValueError("ell_n must be positive")
    p = (ell ** (1.0 / 3.0) + f) / ell ** (4.0 / 3.0)
    if p <= 0.0:
        raise ValueError(f"f={f} drives the edge parameter nonpositive (needs f > -ell^(1/3))")
    return p


def edge_probability(model: ModelVariant, wi: float, wj: float, p: float, ell: float, n: int) -> float:
    if model is ModelVariant.POISSON:
        return -math.expm1(-wi * wj * p)
    x = wi * wj * p
    if model is ModelVariant.CHUNG_LU:
        return min(x, 1.0)
    return x * ell / (n + x * ell)


def _check_chung_lu(wv: WeightVector, p: float, strict: bool) -> None:
    if strict and wv.w_max * wv.w_max * p > 1.0 and wv.n >= 2:
        q01 = wv.w[0] * wv.w[1] * p
        raise ValueError(
            "Chung-Lu probability exceeds 1: w_max^2 * p = "
            f"{wv.w_max ** 2 * p:.6g} > 1 (largest pair (0, 1) has w0*w1*p = {q01:.6g})"
        )


def _build_sample(n, p, model, eu, ev, caps) -> GraphSample:
    m = len(eu)
    src = np.concatenate([eu, ev])
    dst = np.concatenate([ev, eu])
    order = np.lexsort((dst, src))
    indices = dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return GraphSample(
        n=n, p=float(p), model=model,
        indptr=indptr, indices=indices.astype(np.int64),
        edge_u=eu.astype(np.int64), edge_v=ev.astype(np.int64),
        capacities=None if caps is None else caps.astype(np.float64),
        m=int(m),
    )


def _directed_edge_values(n, eu, ev, values, indptr, indices):
    src = np.concatenate([eu, ev])
    dst = np.concatenate([ev, eu])
    vals = np.concatenate([values, values])
    order = np.lexsort((dst, src))
    return vals[order]


def sample_reference(wv: WeightVector, p: float, model: ModelVariant, seed: int,
                     *, max_n: int = REFERENCE_MAX_N, strict: bool = True) -> GraphSample:
    """Quadratic-time sampler: every pair {i, j} gets an independent uniform.

    The oracle implementation: row i draws uniforms for all j > i in index
    order from a single PCG64 stream, so samples are reproducible and easy
    to reason about. Guarded to n <= max_n.
    """
    n = wv.n
    if n > max_n:
        raise ValueError(f"n={n} exceeds the reference sampler guard ({max_n}); use sample_fast")
    if model is ModelVariant.CHUNG_LU:
        _check_chung_lu(wv, p, strict)
    rng = _rng.generator(seed, _rng.TAG_GRAPH)
    w = wv.w
    ell = wv.ell_n
    eu_parts, ev_parts = [], []
    for i in range(n - 1):
        wj = w[i + 1:]
        if model is ModelVariant.POISSON:
            q = -np.expm1(-w[i] * wj * p)
        elif model is ModelVariant.CHUNG_LU:
            q = np.minimum(w[i] * wj * p, 1.0)
        else:
            x = w[i] * wj * p * ell
            q = x / (n + x)
        hit = rng.random(n - 1 - i) < q
        js = np.nonzero(hit)[0] + i + 1
        if len(js):
            eu_parts.append(np.full(len(js), i, dtype=np.int64))
            ev_parts.append(js.astype(np.int64))
    eu = np.concatenate(eu_parts) if eu_parts else np.empty(0, np.int64)
    ev = np.concatenate(ev_parts) if ev_parts else np.empty(0, np.int64)
    caps = None
    if model is ModelVariant.POISSON and len(eu):
        lam = w[eu] * w[ev]
        u = rng.random(len(eu))
        caps = -np.log1p(u * np.expm1(-lam * p)) / lam
    elif model is ModelVariant.POISSON:
        caps = np.empty(0, np.float64)
    return _build_sample(n, p, model, eu, ev, caps)


def sample_fast(wv: WeightVector, p: float, model: ModelVariant, seed: int,
                *, strict: bool = True) -> GraphSample:
    """Skip sampler: same edge law as :func:`sample_reference`, O(n + m) expected.

    Each row walks its candidate neighbours with geometric skips under a
    majorant probability that is refreshed as the scan moves to smaller
    weights; rows use independent counter-based substreams, so the output
    is identical however rows are scheduled.
    """
    n = wv.n
    if model is ModelVariant.CHUNG_LU:
        _check_chung_lu(wv, p, strict)
    seed64 = _rng.kernel_seed(seed, _rng.TAG_GRAPH)
    want_caps = model is ModelVariant.POISSON
    # expected edge count plus generous slack for the buffer
    exp_m = _expected_edge_count(wv, p, model)
    cap = int(exp_m + 12.0 * math.sqrt(exp_m + 1.0) + 4096)
    while True:
        eu = np.empty(cap, np.int64)
        ev = np.empty(cap, np.int64)
        ec = np.empty(cap if want_caps else 1, np.float64)
        m = _kernels.sample_skip(wv.w, float(p), wv.ell_n, model.code, seed64,
                                 want_caps, eu, ev, ec)
        if m >= 0:
            break
        cap *= 2
    caps = ec[:m].copy() if want_caps else None
    return _build_sample(n, p, model, eu[:m].copy(), ev[:m].copy(), caps)


def _expected_edge_count(wv: WeightVector, p: float, model: ModelVariant) -> float:
    """Upper estimate of E[m] used to size the skip sampler's buffers."""
    pairs = wv.n * (wv.n - 1) / 2.0
    if not math.isfinite(p):
        return pairs
    x = (wv.ell_n**2 - wv.s2) / 2.0 * p  # sum over pairs of w_i w_j p
    return min(x, pairs)


def expected_edge_count_exact(wv: WeightVector, p: float, model: ModelVariant) -> float:
    """Sum of q_ij over pairs; quadratic, meant for small-n oracles."""
    w = wv.w
    total = 0.0
    for i in range(wv.n - 1):
        for j in range(i + 1, wv.n):
            total += edge_probability(model, w[i], w[j], p, wv.ell_n, wv.n)
    return total


def sample_capacity_matrix(wv: WeightVector, seed: int,
                           *, max_n: int = CAPACITY_MATRIX_MAX_N) -> CapacityMatrix:
    """Draw the full capacity table E_ij ~ Exp(w_i w_j) for all pairs i < j."""
    n = wv.n
    if n > max_n:
        raise ValueError(
            f"n={n} exceeds the capacity-matrix guard ({max_n}); "
            "sample_fast draws a single threshold level without the table"
        )
    rng = _rng.generator(seed, _rng.TAG_GRAPH)
    table = np.zeros((n, n), dtype=np.float64)
    iu, ju = np.triu_indices(n, k=1)
    lam = wv.w[iu] * wv.w[ju]
    table[iu, ju] = rng.exponential(1.0, size=len(iu)) / lam
    return CapacityMatrix(n=n, table=table)


def threshold_graph(cm: CapacityMatrix, p: float) -> GraphSample:
    """Keep the edges of the capacity table with capacity <= p."""
    iu, ju = np.triu_indices(cm.n, k=1)
    vals = cm.table[iu, ju]
    keep = vals <= p
    return _build_sample(cm.n, p, ModelVariant.POISSON,
                         iu[keep].astype(np.int64), ju[keep].astype(np.int64),
                         vals[keep])


def graph_from_edges(n: int, edges, capacities=None, *, p: float = math.nan,
                     model: ModelVariant = ModelVariant.POISSON) -> GraphSample:
    """Build a GraphSample from an explicit undirected edge list."""
    if len(edges):
        arr = np.asarray(edges, dtype=np.int64)
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
    else:
        lo = hi = np.empty(0, np.int64)
    caps = None if capacities is None else np.asarray(capacities, dtype=np.float64)
    return _build_sample(n, p, model, lo, hi, caps)


def write_edgelist(g: GraphSample, path) -> None:
    """CSV with header u,v,capacity; 0-based ids; capacity empty unless coupled."""
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "capacity"])
        if g.capacities is None:
            for u, v in zip(g.edge_u, g.edge_v):
                writer.writerow([int(u), int(v), ""])
        else:
            for u, v, c in zip(g.edge_u, g.edge_v, g.capacities):
                writer.writerow([int(u), int(v), repr(float(c))])


def read_edgelist(path, n: int | None = None, *, p: float = math.nan,
                  model: ModelVariant = ModelVariant.POISSON) -> GraphSample:
    """Read the edge-list CSV back; n defaults to 1 + max vertex id."""
    eu, ev, caps = [], [], []
    have_caps = True
    with open(Path(path), "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header[:2]] != ["u", "v"]:
            raise ValueError(f"{path}: unexpected edge-list header {header!r}")
        for row in reader:
            if not row:
                continue
            eu.append(int(row[0]))
            ev.append(int(row[1]))
            if len(row) > 2 and row[2] != "":
                caps.append(float(row[2]))
            else:
                have_caps = False
    u = np.asarray(eu, dtype=np.int64)
    v = np.asarray(ev, dtype=np.int64)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    if n is None:
        n = int(hi.max()) + 1 if len(hi) else 0
    cap_arr = np.asarray(caps, dtype=np.float64) if (have_caps and len(caps) == len(eu)) else None
    if cap_arr is not None and math.isnan(p) and len(cap_arr):
        p = float(cap_arr.max())
    return _build_sample(n, p, model, lo, hi, cap_arr)
