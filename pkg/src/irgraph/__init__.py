"""Rank-1 inhomogeneous random graphs near the critical window.

Subpackages by concern:

* :mod:`irgraph.weights` -- weight vectors, moment conditions;
* :mod:`irgraph.graphgen` -- edge samplers (reference and skip) and the
  capacity-threshold coupling;
* :mod:`irgraph.explorer` -- the breadth-first walk, component statistics,
  and the drift-comparison walk;
* :mod:`irgraph.sbs` -- size-biased sampling without replacement, clock
  coupling, exact small-n enumeration tooling;
* :mod:`irgraph.theory` -- closed-form component-structure predictions;
* :mod:`irgraph.harness` -- seeded Monte Carlo experiment runner;
* :mod:`irgraph.cli` -- the ``irgraph`` command-line entry point.
"""

from .weights import WeightVector, generate_constant, generate_pareto_iid, load_weights, validate_conditions
from .graphgen import (
    CapacityMatrix,
    GraphSample,
    ModelVariant,
    critical_p,
    sample_capacity_matrix,
    sample_fast,
    sample_reference,
    threshold_graph,
)
from .explorer import ComponentStats, ExplorationTrace, component_stats, explore, l0_trace, largest_component
from .sbs import SbsDraw, check_conjectures, check_monotonicity, draw_clock, draw_sequential, enumerate_exact, mean_curve
from .theory import Prediction, drift_curve, predict
from .harness import ExperimentConfig, ExperimentReport, decay_fit, regime_sweep, run

__version__ = "0.1.0"
