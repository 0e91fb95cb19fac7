"""Centralized tolerance and size-cap configuration.

Every numeric decision in the library (feasibility, rank, support counting,
vertex identity) goes through one of these knobs, so a single record controls
the meaning of "zero" everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Tolerance coefficients.

    The scaled helpers multiply by (1 + magnitude) of the data they guard, so
    the stored values are relative coefficients, not absolute thresholds.
    """

    feas: float = 1e-9   # feasibility of Ax=b and of half-space rows
    rank: float = 1e-10  # relative singular-value cutoff for rank decisions
    orth: float = 1e-10  # orthonormality slack of the null basis
    zero: float = 1e-8   # support counting: |x_i| above this counts as nonzero
    dedup: float = 1e-8  # vertex identity

    def feas_tol(self, scale: float) -> float:
        return self.feas * (1.0 + scale)

    def zero_tol(self, x_inf: float) -> float:
        return self.zero * (1.0 + x_inf)

    def dedup_tol(self, scale: float) -> float:
        return self.dedup * (1.0 + scale)


@dataclass(frozen=True)
class Caps:
    """Hard size limits.

    Exceeding any of them raises BlowupLimit; the library never silently
    approximates past its exact regime.
    """

    n_max: int = 10           # unknowns
    d_max: int = 4            # corank (null-space dimension)
    fm_row_cap: int = 20000   # rows allowed during Fourier-Motzkin elimination
    subset_cap: int = 5_000_000  # row subsets allowed during vertex enumeration


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_CAPS = Caps()
