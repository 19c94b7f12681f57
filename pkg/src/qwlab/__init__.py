"""Stationary measures of one-dimensional diagonal quantum walks with one defect."""

from .coin import (
    CoinFamily,
    CoinMatrix,
    Defect2Params,
    Diag2Params,
    Diag3Params,
    build_defect2,
    build_diag2,
    build_diag3,
    build_family,
    hadamard,
    random_unitary,
    split_rows,
    validate_unitary,
)
from .core import (
    ChiralitySpec,
    Interval,
    MeasureProfile,
    PiecewiseMeasure,
    WaveState,
    compare_measures,
    l2_norm,
    measure_of,
    shift_offsets,
)
from .eigen import (
    BoundaryData,
    EigenSolution,
    admissible_lambda2,
    admissible_lambda3,
    local_residual,
    shoot2,
    shoot3,
)
from .evolve import evolve, measure_stationarity_check, step, valid_interior

__version__ = "0.1.0"
