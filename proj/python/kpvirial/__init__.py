"""KP evolution with conserved-quantity and virial diagnostics."""

from ._core import (
    BadMagic,
    BlowUp,
    Grid,
    GridMismatch,
    NonZeroXMean,
    ParseError,
    ScheduleParams,
    TruncatedFile,
    ValidationError,
    check_names,
    conserved,
    diagnostics,
    eta,
    evolve,
    interpolation_ratio,
    lambda_,
    lump,
    lump_field,
    read_snapshot,
    run,
    run_check,
    theta,
    validate_config,
    write_snapshot,
)

__all__ = [name for name in dir() if not name.startswith("_")]
