"""Operator asymmetry norms and asymmetry-bounded uncertainty relations.

Matrices are numpy arrays (converted to complex128). States are 1-D arrays
(kets) or 2-D arrays (density matrices). Exponents are floats; use
``math.inf`` for the operator norm.
"""

import json

import numpy as np

from . import _opasym
from ._opasym import (
    OpasymError,
    aur_qsl_bound,
    mt_bound,
    oracle_norm,
    pinch,
    propagate,
    pure_commutator_norm_identity,
    schatten_norm,
    trajectory,
    variance,
    velocity,
    wysi,
)

__all__ = [
    "OpasymError",
    "asymmetry_norm",
    "aur_qsl_bound",
    "bound",
    "error_code",
    "mt_bound",
    "oracle_norm",
    "pauli",
    "pinch",
    "propagate",
    "pure_commutator_norm_identity",
    "reproduce",
    "schatten_norm",
    "sweep",
    "trajectory",
    "variance",
    "velocity",
    "wysi",
]

_PAULI = {
    "i": [[1, 0], [0, 1]],
    "x": [[0, 1], [1, 0]],
    "y": [[0, -1j], [1j, 0]],
    "z": [[1, 0], [0, -1]],
}


def pauli(axis):
    return np.array(_PAULI[axis], dtype=complex)


def error_code(exc):
    """The code prefix of an OpasymError, e.g. "NotHermitian"."""
    return str(exc).split(":", 1)[0]


def asymmetry_norm(b, a, p=2.0, **solver):
    """N_p(B|A); returns a dict with value, method, iterations, converged,
    lower_bound and the optimizer matrix."""
    return _opasym.asymmetry_norm(b, a, p, **solver)


def bound(relation, state, a, b, p=2.0, r=2.0, report_tol=1e-9):
    return json.loads(_opasym.bound_json(relation, state, a, b, p, r, report_tol))


def sweep(relation, dim, n, **kwargs):
    """Returns (summary dict, CSV text)."""
    summary, csv = _opasym.sweep(relation, dim, n, **kwargs)
    return json.loads(summary), csv


def reproduce(scenario):
    return json.loads(_opasym.reproduce_json(scenario))
