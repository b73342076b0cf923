"""Probabilistic reformulation of discrete optimization: exact moment
oracles, analytical and sampled gradient solvers, and the reflecting-surface
case-study objectives.

The compiled extension normally sits inside this package (wheel layout). For
development builds, set ``PRFOPT_CORE_DIR`` to the directory holding the
compiled ``_core`` module and import from the source tree.
"""

from __future__ import annotations

import os
import sys

try:
    from . import _core  # wheel layout: prfopt/_core*.so
except ImportError:  # pragma: no cover - exercised in development builds
    _dir = os.environ.get("PRFOPT_CORE_DIR")
    if not _dir:
        raise
    sys.path.insert(0, _dir)
    import _core  # type: ignore[no-redef]

boxqp_transform = _core.boxqp_transform
derive_seed = _core.derive_seed
exhaustive_capacity = _core.exhaustive_capacity
expectation_exact = _core.expectation_exact
grad_qf = _core.grad_qf
grad_ql = _core.grad_ql
grad_qs = _core.grad_qs
mean_qf = _core.mean_qf
mean_ql = _core.mean_ql
mean_qs = _core.mean_qs
sample_categorical = _core.sample_categorical
sinr_instance = _core.sinr_instance
solve_ee = _core.solve_ee
solve_sinr = _core.solve_sinr
taylor_surrogate = _core.taylor_surrogate

__all__ = [
    "boxqp_transform",
    "derive_seed",
    "exhaustive_capacity",
    "expectation_exact",
    "grad_qf",
    "grad_ql",
    "grad_qs",
    "mean_qf",
    "mean_ql",
    "mean_qs",
    "sample_categorical",
    "sinr_instance",
    "solve_ee",
    "solve_sinr",
    "taylor_surrogate",
]
