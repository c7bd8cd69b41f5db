"""Verification engine for spectral resolutions of identity in two exactly
solvable non-Hermitian models with exceptional points.

Modules:
    testspace: weighted test-function spaces and the named test functions.
    models: eigenfunctions of the edge and inner models.
    contours: deformed integration contours and contour quadrature.
    kernels: closed forms of the spectral kernels and their decompositions.
    limits: pairings, limit probes and convergence classification.
    verify: the check catalog and suite runner.
    cli: command-line front door.
"""

from .config import RunConfig
from .contours import DeformationSpec, edge_contour, epsilon_arc, inner_contour, integrate
from .kernels import (
    KernelValue,
    edge_kernel_closed,
    edge_kernel_direct,
    inner_eps_kernel_closed,
    inner_eps_kernel_direct,
    inner_kernel_closed,
    inner_kernel_direct,
)
from .limits import (
    ConvergenceReport,
    PreconditionError,
    classify,
    delta_probe,
    pair,
    vanishing_probe,
)
from .models import EdgeModel, InnerModel, parse_model, psi0_inner, psi1_inner, psi_edge
from .testspace import TestFunction, parse_test_function, weighted_l2_norm
from .verify import CheckResult, CheckSpec, probe_report, run_check, run_suite

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "DeformationSpec",
    "edge_contour",
    "inner_contour",
    "epsilon_arc",
    "integrate",
    "KernelValue",
    "edge_kernel_closed",
    "edge_kernel_direct",
    "inner_kernel_closed",
    "inner_kernel_direct",
    "inner_eps_kernel_closed",
    "inner_eps_kernel_direct",
    "ConvergenceReport",
    "PreconditionError",
    "classify",
    "delta_probe",
    "pair",
    "vanishing_probe",
    "EdgeModel",
    "InnerModel",
    "parse_model",
    "psi_edge",
    "psi0_inner",
    "psi1_inner",
    "TestFunction",
    "parse_test_function",
    "weighted_l2_norm",
    "CheckResult",
    "CheckSpec",
    "probe_report",
    "run_check",
    "run_suite",
]
