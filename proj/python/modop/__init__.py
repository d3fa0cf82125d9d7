"""Operators on finite-rank Hilbert C*-modules over direct sums of matrix algebras.

Operators are ``Operator`` objects built from per-block complex matrices.
Verifiers return plain dictionaries mirroring the JSON reports of the CLI.
"""

import json

from ._modop import (
    DEFAULT_TOL,
    ModopError,
    Operator,
    abs_op,
    bounded_transform,
    commutes,
    inverse_transform,
    is_normal,
    is_positive,
    is_selfadjoint,
    kernel_projection,
    polar,
    random_normal,
    random_operator,
    range_projection,
    solve_intertwiners,
    transform_q,
)
from . import _modop

REGULAR_TOL = 1e-8


def check_polar_conditions(t, tol=DEFAULT_TOL):
    return json.loads(_modop._check_polar_conditions(t, tol))


def check_commutant_transfer(t, s, tol=DEFAULT_TOL):
    return json.loads(_modop._check_commutant_transfer(t, s, tol))


def check_v_unitary_on_range(t, tol=DEFAULT_TOL):
    return json.loads(_modop._check_v_unitary_on_range(t, tol))


def build_unitary_abs(t, tol=DEFAULT_TOL):
    """U with T = U|T|; returns (U, witness report)."""
    u, report = _modop._build_unitary_abs(t, tol)
    return u, json.loads(report)


def build_unitary_star(t, tol=DEFAULT_TOL):
    """U with T = UT*; returns (U, witness report)."""
    u, report = _modop._build_unitary_star(t, tol)
    return u, json.loads(report)


def verify_converse_star(t, u, tol=DEFAULT_TOL):
    return json.loads(_modop._verify_converse_star(t, u, tol))


def fuglede_putnam_check(t, s, a, tol=DEFAULT_TOL):
    return json.loads(_modop._fuglede_putnam_check(t, s, a, tol))


def kaplansky_check(t, s, tol=DEFAULT_TOL):
    return json.loads(_modop._kaplansky_check(t, s, tol))


def transform_adjoint_compat(t, tol=DEFAULT_TOL):
    return json.loads(_modop._transform_adjoint_compat(t, tol))


def theorem_regular_normal(t, tol=REGULAR_TOL):
    u, report = _modop._theorem_regular_normal(t, tol)
    return u, json.loads(report)


def run_suite(trials=200, seed=1, max_block=3, max_rank=4, tol=None, suites=(), threads=0):
    """Run the randomized property suites and return the report as a dict."""
    return json.loads(_modop._run_suite(trials, seed, max_block, max_rank, tol, list(suites), threads))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
