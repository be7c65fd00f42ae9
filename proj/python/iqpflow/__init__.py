"""IQP circuits warm-started from QAOA.

Thin layer over the compiled ``_core`` module; functions that return JSON
text in C++ return plain dicts here.
"""

import json as _json

from ._core import (  # noqa: F401
    DimensionError,
    GroundTruth,
    InputError,
    IqpParams,
    IsingProblem,
    QaoaParams,
    ResourceLimitError,
    ThermalFit,
    boltzmann,
    brute_force_ground,
    embed_qaoa,
    energy,
    energy_and_gradient,
    fit_beta,
    flow,
    gram,
    ground_overlap,
    iqp_state,
    optimize_qaoa,
    qaoa_state,
    sample,
    shots_schedule,
    sk_random,
)
from . import _core


def run(problem, config=None):
    """Warm start, flow, selection, sampling and thermal fits; returns the report dict."""
    return _json.loads(_core.run_report(problem, _json.dumps(config or {})))


def counterexample(theta2=None):
    """Checks along the four-qubit critical line; returns the report dict."""
    if theta2 is None:
        return _json.loads(_core.counterexample_report())
    return _json.loads(_core.counterexample_report(list(theta2)))
