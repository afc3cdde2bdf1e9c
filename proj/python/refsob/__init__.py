"""Refined Sobolev scales: norms, interpolation, extensions and parabolic problems."""

import json

import numpy as np

from . import _refsob
from ._refsob import (
    CapExceeded,
    DomainError,
    FailedPrecondition,
    ParseError,
    RefsobError,
    suite_names,
)

__all__ = [
    "CapExceeded",
    "DomainError",
    "FailedPrecondition",
    "ParseError",
    "RefsobError",
    "check_class_m",
    "check_parabolicity",
    "hestenes_coeffs",
    "norm_refined",
    "phi",
    "power_verdict",
    "probe",
    "psi_verdict",
    "run_suite",
    "suite_names",
]


def phi(descriptor, r):
    """Values of a function parameter ("one", "log[1,-1]", ...) at r >= 1."""
    return np.asarray(_refsob.phi_eval(descriptor, np.atleast_1d(r).astype(float).tolist()))


def check_class_m(descriptor):
    return json.loads(_refsob.check_class_m(descriptor))


def psi_verdict(s0, s, s1, phi="one"):
    return json.loads(_refsob.psi_verdict(s0, s, s1, phi))


def power_verdict(a):
    return json.loads(_refsob.power_verdict(a))


def hestenes_coeffs(k):
    """Exact reflection coefficients as fractions.Fraction values."""
    from fractions import Fraction

    return [Fraction(v) for v in json.loads(_refsob.hestenes_coeffs(k))["lambda"]]


def norm_refined(data, box, s, phi="one", b=1, guard=None):
    """Refined norm of periodic samples; box is [lo, hi] or [x_lo, x_hi, t_lo, t_hi]."""
    kwargs = {} if guard is None else {"guard": guard}
    return _refsob.norm_refined(np.asarray(data, dtype=complex), list(box), s, phi, b, **kwargs)


def check_parabolicity(problem):
    """problem: "heat", "backward-heat", "heat-neumann" or a .prob path."""
    return json.loads(_refsob.check_parabolicity(str(problem)))


def probe(problem, sigma=3.0, phi="one", sizes=(32, 64, 128), trials=6, seed=7):
    return json.loads(_refsob.probe(str(problem), sigma, phi, list(sizes), trials, seed))


def run_suite(name, seed=7, case=None):
    ok, report = _refsob.run_suite(name, seed, case)
    return ok, json.loads(report)
