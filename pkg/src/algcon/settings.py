"""Numeric tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    eig_residual: float = 1e-8
    zero_clamp: float = 1e-9
    symmetry: float = 1e-9
    # relative violation threshold for lambda_min of the lifted matrix
    psd_violation: float = 1e-6
    # strict-improvement threshold for accepted k-opt moves
    improvement: float = 1e-9
    connected_lambda: float = 1e-8
    binary_round: float = 1e-6
    # above this size the Fiedler pair comes from shift-invert Lanczos
    dense_max_n: int = 512


TOL = Tolerances()
