"""Run-wide numerical settings."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

ENV_TOL = "ELLCOMMUTE_TOL"


def _env_rtol(default: float = 1e-10) -> float:
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return default
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{ENV_TOL} must be positive, got {raw!r}")
    return value


@dataclass(frozen=True)
class Tolerances:
    # series equality
    rtol: float = field(default_factory=_env_rtol)
    atol: float = 1e-14
    # operator identities, scale-free
    operator_zero: float = 1e-9
    # z-constancy of QΨ/Ψ quotients
    constancy: float = 1e-9
    # relative eigenvalue gap treated as ramification; rounding splits a
    # Jordan block by about sqrt(machine eps), so this must sit well above 1e-8
    branch_gap: float = 1e-5
    # integrator
    ode_rtol: float = 1e-9
    ode_atol: float = 1e-12
    min_clearance: float = 0.05


@dataclass(frozen=True)
class SeriesWindow:
    """Default z- and λ-windows for acceptance-style runs."""

    z_min: int = -8
    z_max: int = 24
    lam_max: int = 16


DEFAULT_TOL = Tolerances()
DEFAULT_WINDOW = SeriesWindow()
