"""Size-biased sampling without replacement.

Two independent samplers realize the same order law:

* the sequential sampler draws index after index with probability
  proportional to the remaining weight (Fenwick-tree backed);
* the clock sampler attaches an independent Exp(w_k / ell_n) alarm to each
  item and reads the indices off in ring order. The counting process
  N(x) and the weighted process X(x) of rung items satisfy, exactly per
  sample, X(x) = sum_k w_{v'(k)} * 1(N(x) >= k).

Alongside the samplers: Monte Carlo mean curves for the position-wise
drawn weight, an exact enumeration oracle for small n, an exact
monotonicity check for capped weights (survival of the drawn capped
weight never increases with the draw position), and exact checkers for
two open dominance questions comparing ordered biased sampling with and
without replacement.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels, _rng
from .weights import WeightVector

__all__ = [
    "SbsMethod",
    "SbsDraw",
    "ClockTrace",
    "TruncatedWeightView",
    "MeanCurve",
    "draw_sequential",
    "draw_clock",
    "mean_curve",
    "enumerate_exact",
    "enumerate_order_law",
    "check_monotonicity",
    "check_conjectures",
    "clock_order_probability",
]

ENUM_MAX_N = 8
CONJECTURE_MAX_N = 6


class SbsMethod(enum.Enum):
    SEQUENTIAL = "sequential"
    CLOCK = "clock"


@dataclass(frozen=True)
class SbsDraw:
    """Indices in draw order (0-based); a prefix or the full permutation."""

    order: np.ndarray
    method: SbsMethod


@dataclass(frozen=True)
class ClockTrace:
    """Alarm times plus the counting/weighted processes on a grid."""

    times: np.ndarray  # T_k per item, original index order
    grid: np.ndarray
    counts: np.ndarray  # N(x) per grid point
    weighted: np.ndarray  # X(x) per grid point


@dataclass(frozen=True)
class TruncatedWeightView:
    """Monotone view w -> min(w, cap)."""

    cap: float

    def __call__(self, w):
        return np.minimum(w, self.cap)


def draw_sequential(wv: WeightVector, m: int, seed: int) -> SbsDraw:
    """First ``m`` indices of a size-biased sample without replacement."""
    if not 1 <= m <= wv.n:
        raise ValueError(f"m={m} out of range 1..{wv.n}")
    out = np.empty(m, dtype=np.int64)
    _kernels.sbs_sequential(wv.w, m, _rng.kernel_seed(seed, 0), out)
    return SbsDraw(order=out, method=SbsMethod.SEQUENTIAL)


def draw_clock(wv: WeightVector, seed: int, grid: np.ndarray | None = None) -> tuple[SbsDraw, ClockTrace]:
    """Exponential-clock sample: full order plus the N/X processes.

    Item k rings at T_k ~ Exp(w_k / ell_n), drawn by inverse CDF from a
    per-item counter substream, so the permutation for a given seed is
    stable under any evaluation order. ``grid`` defaults to the ring times
    themselves.
    """
    u = _rng.counter_uniforms(_rng.kernel_seed(seed, 1), wv.n)
    times = -(wv.ell_n / wv.w) * np.log1p(-u)
    order = np.argsort(times, kind="stable")
    if grid is None:
        grid = np.sort(times)
    grid = np.asarray(grid, dtype=np.float64)
    sorted_times = times[order]
    counts = np.searchsorted(sorted_times, grid, side="right")
    cum = np.concatenate([[0.0], np.cumsum(wv.w[order])])
    weighted = cum[counts]
    trace = ClockTrace(times=times, grid=grid, counts=counts.astype(np.int64), weighted=weighted)
    return SbsDraw(order=order.astype(np.int64), method=SbsMethod.CLOCK), trace


def clock_order_probability(wv: WeightVector, perm) -> float:
    """Closed-form probability that the clocks ring in order ``perm``.

    For independent exponential alarms the race is won by each item with
    probability rate/(sum of remaining rates), giving the product formula
    prod_k w_{perm[k]} / (w_{perm[k]} + w_{perm[k+1]} + ...).
    """
    w = wv.w
    rem = float(np.sum(w[list(perm)]))
    prob = 1.0
    for idx in perm:
        prob *= w[idx] / rem
        rem -= w[idx]
    return prob


@dataclass(frozen=True)
class MeanCurve:
    """Per-position empirical mean of the drawn weight, with prediction."""

    l: np.ndarray
    empirical_mean: np.ndarray
    stderr: np.ndarray
    prediction: np.ndarray
    rounds: int

    def write_csv(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8", newline="") as fh:
            fh.write("l,empirical_mean,stderr,prediction\n")
            for l, m, s, p in zip(self.l, self.empirical_mean, self.stderr, self.prediction):
                fh.write(f"{int(l)},{float(m)!r},{float(s)!r},{float(p)!r}\n")


def mean_curve(wv: WeightVector, l_max: int, rounds: int, seed: int) -> MeanCurve:
    """Monte Carlo estimate of E[w at draw position l] for l = 1..l_max.

    The returned prediction is the first-order curve
    1 + (l / ell_n) (1 - c_hat): flat for constant weights, decreasing
    whenever the third moment exceeds the first.
    """
    if not 1 <= l_max <= wv.n:
        raise ValueError(f"l_max={l_max} out of range 1..{wv.n}")
    if rounds < 2:
        raise ValueError("rounds must be >= 2")
    s1, s2 = _kernels.mean_curve_sums(wv.w, l_max, rounds, _rng.kernel_seed(seed, 2))
    mean = s1 / rounds
    var = np.maximum(s2 / rounds - mean**2, 0.0)
    stderr = np.sqrt(var / rounds)
    l = np.arange(1, l_max + 1)
    prediction = 1.0 + (l / wv.ell_n) * (1.0 - wv.c_hat)
    return MeanCurve(l=l, empirical_mean=mean, stderr=stderr, prediction=prediction, rounds=rounds)


# ---------------------------------------------------------------------------
# Exact enumeration for small n
# ---------------------------------------------------------------------------


def enumerate_order_law(weights) -> list[tuple[tuple[int, ...], float]]:
    """All n! orders with their exact product probabilities."""
    w = np.asarray(weights, dtype=np.float64)
    n = len(w)
    if n > ENUM_MAX_N:
        raise ValueError(f"n={n} exceeds the enumeration cap ({ENUM_MAX_N})")
    total = float(np.sum(w))
    out = []
    for perm in itertools.permutations(range(n)):
        rem = total
        prob = 1.0
        for idx in perm:
            prob *= w[idx] / rem
            rem -= w[idx]
        out.append((perm, prob))
    return out


def enumerate_exact(weights, statistic) -> float:
    """Exact expectation of ``statistic(order)`` under the size-biased law.

    ``statistic`` maps a permutation (tuple of 0-based indices in draw
    order) to a number. Brute force over all n! orders, n <= 8.
    """
    return float(sum(prob * statistic(perm) for perm, prob in enumerate_order_law(weights)))


@dataclass(frozen=True)
class MonotonicityReport:
    """Exact survival table of the capped drawn weight by position."""

    weights: tuple[float, ...]
    cap: float
    thresholds: tuple[float, ...]
    survival: np.ndarray  # (len(thresholds), n): P(min(w_v(u), cap) >= x)
    violations: list[tuple[float, int]]  # (x, u) where survival increased
    ok: bool


def check_monotonicity(weights, cap: float = math.inf, tol: float = 1e-12) -> MonotonicityReport:
    """Verify P(min(w at position u, cap) >= x) is non-increasing in u.

    This holds exactly for every weight vector and cap (later draws are
    stochastically smaller); a violation beyond ``tol`` indicates an
    implementation bug rather than a counterexample.
    """
    w = np.asarray(weights, dtype=np.float64)
    n = len(w)
    law = enumerate_order_law(w)
    capped = TruncatedWeightView(cap)(w)
    thresholds = tuple(sorted(set(capped.tolist())))
    surv = np.zeros((len(thresholds), n))
    for perm, prob in law:
        vals = capped[list(perm)]
        for xi, x in enumerate(thresholds):
            surv[xi] += prob * (vals >= x)
    violations = []
    for xi, x in enumerate(thresholds):
        for u in range(n - 1):
            if surv[xi, u + 1] > surv[xi, u] + tol:
                violations.append((float(x), u + 1))
    return MonotonicityReport(
        weights=tuple(float(x) for x in w),
        cap=float(cap),
        thresholds=tuple(float(x) for x in thresholds),
        survival=surv,
        violations=violations,
        ok=not violations,
    )


@dataclass(frozen=True)
class ConjectureInstance:
    kind: str  # "concentration" | "ordered_shift" | "ordered_replacement"
    n: int
    weights: tuple[float, ...]
    m: int
    l: int | None
    x: tuple[float, ...] | float
    holds: bool
    asserted: bool  # whether theory claims this instance must hold

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "weights": list(self.weights),
            "m": self.m,
            "l": self.l,
            "x": list(self.x) if isinstance(self.x, tuple) else self.x,
            "holds": self.holds,
            "asserted": self.asserted,
        }


@dataclass(frozen=True)
class ConjectureReport:
    instances: list[ConjectureInstance]

    @property
    def asserted_ok(self) -> bool:
        return all(i.holds for i in self.instances if i.asserted)

    @property
    def all_hold(self) -> bool:
        return all(i.holds for i in self.instances)

    def failing(self) -> list[ConjectureInstance]:
        return [i for i in self.instances if not i.holds]

    def write_json(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8") as fh:
            json.dump([i.to_dict() for i in self.instances], fh, indent=1)


def _without_replacement_prefix_survivals(weights, law, m, shift):
    """Joint survival table P(w_v(1+s) >= x_1, ..., w_v(m+s) >= x_m)."""
    w = np.asarray(weights, dtype=np.float64)
    levels = sorted(set(w.tolist()))
    table = {}
    for xs in itertools.product(levels, repeat=m):
        p = 0.0
        for perm, prob in law:
            if all(w[perm[k + shift]] >= xs[k] for k in range(m)):
                p += prob
        table[xs] = p
    return levels, table


def check_conjectures(weights, m_max: int, tol: float = 1e-12) -> ConjectureReport:
    """Exact check of two dominance questions for biased sampling.

    Ordered question, for prefixes of length m: with weights (and hence
    draw probabilities) sorted descending,
      (a) P(w_v(1)>=x_1,...,w_v(m)>=x_m) >= P(w_v(2)>=x_1,...,w_v(m+1)>=x_m);
      (b) the same prefix survival is dominated by its with-replacement
          counterpart (i.i.d. copies of the first draw).
    Proven for m = 1, provable for m = 2; m >= 3 is reported, not asserted.

    Concentration question, for every window (l, m): the without-
    replacement partial sum over draws l..m should deviate from its mean
    no more (in probability, at every achievable deviation) than the same
    window of i.i.d. first-draw copies. Entirely unasserted.
    """
    w = np.asarray(sorted(weights, reverse=True), dtype=np.float64)
    n = len(w)
    if n > CONJECTURE_MAX_N:
        raise ValueError(f"n={n} exceeds the conjecture-checker cap ({CONJECTURE_MAX_N})")
    if not 1 <= m_max <= n - 1:
        raise ValueError(f"m_max={m_max} out of range 1..{n - 1}")
    law = enumerate_order_law(w)
    ell = float(np.sum(w))
    first_draw = w / ell  # marginal of the first (and of every i.i.d. copy)
    instances: list[ConjectureInstance] = []

    for m in range(1, m_max + 1):
        levels, tab0 = _without_replacement_prefix_survivals(w, law, m, 0)
        _, tab1 = _without_replacement_prefix_survivals(w, law, m, 1)
        single = {x: float(np.sum(first_draw[w >= x])) for x in levels}
        for xs in itertools.product(levels, repeat=m):
            hold_shift = tab0[xs] >= tab1[xs] - tol
            repl = math.prod(single[x] for x in xs)
            hold_repl = repl >= tab0[xs] - tol
            asserted = m <= 2
            instances.append(ConjectureInstance("ordered_shift", n, tuple(w), m, None, xs, bool(hold_shift), asserted))
            instances.append(ConjectureInstance("ordered_replacement", n, tuple(w), m, None, xs, bool(hold_repl), asserted))

    # concentration comparison, exact over both laws
    for l in range(1, n + 1):
        for m in range(l, n + 1):
            width = m - l + 1
            sums = {}
            for perm, prob in law:
                s = round(float(np.sum(w[list(perm[l - 1:m])])), 12)
                sums[s] = sums.get(s, 0.0) + prob
            mean_wo = sum(s * p for s, p in sums.items())
            repl_sums = {}
            for combo in itertools.product(range(n), repeat=width):
                s = round(float(np.sum(w[list(combo)])), 12)
                p = math.prod(first_draw[i] for i in combo)
                repl_sums[s] = repl_sums.get(s, 0.0) + p
            mean_re = sum(s * p for s, p in repl_sums.items())
            devs = sorted(
                {round(abs(s - mean_wo), 10) for s in sums}
                | {round(abs(s - mean_re), 10) for s in repl_sums}
            )
            for x in devs:
                p_wo = sum(pr for s, pr in sums.items() if abs(s - mean_wo) >= x - 1e-9)
                p_re = sum(pr for s, pr in repl_sums.items() if abs(s - mean_re) >= x - 1e-9)
                instances.append(
                    ConjectureInstance(
                        "concentration", n, tuple(w), m, l, float(x), bool(p_wo <= p_re + tol), False
                    )
                )
    return ConjectureReport(instances=instances)
