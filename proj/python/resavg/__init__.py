"""Resonant averaging of weakly nonlinear CGL equations on tori."""

from ._resavg import (
    ConfigError,
    Error,
    NonlinearitySpec,
    NumericError,
    SolverConfig,
    SpectralFrame,
    UnsupportedError,
    ValidationError,
    __version__,
    action_distance,
    actions,
    build_diffusion,
    build_frame,
    effective_drift_analytic,
    effective_drift_numerical,
    eval_P,
    eval_Y,
    frame_hash,
    integrate_effective,
    integrate_effective_stochastic,
    integrate_full,
    integrate_full_stochastic,
    resonance_table,
    run_cli,
    run_study,
    smoothed_power,
    sobolev_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
