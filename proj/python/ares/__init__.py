"""Influenza nowcasting from EHR visit counts and CDC %ILI history."""

from ._ares import (
    ConfigError,
    ConvergenceError,
    CoverageError,
    CvError,
    Dataset,
    DomainError,
    Error,
    GapError,
    InputError,
    IoError,
    KernelError,
    MissingLagError,
    ParseError,
    RangeError,
    ShapeError,
    SvrModel,
    ValidationError,
    backtest_config,
    fit_ols,
    generate,
    load_dataset,
    pearson,
    regions,
    relative_rmse,
    rmse,
    run_backtest,
    svr_fit,
    week_from_date,
)

__all__ = [name for name in dir() if not name.startswith("_")]
