"""Verified enclosures for overdetermined interval linear systems via square subsystems."""

from .errors import (
    AllSubsquaresInconclusive,
    BudgetExceeded,
    DiagonalContainsZero,
    DimensionCap,
    DivisionByZeroInterval,
    EmptyOperand,
    InfiniteBound,
    InvalidOverlap,
    NotContracting,
    OilsError,
    ShapeMismatch,
    SingularMatrix,
    SingularMidpoint,
    SystemFileError,
)
from .generate import GeneratedSystem, generate_random_system
from .hull import HullResult, exact_hull, inner_hull_sampling, op_membership
from .interval import (
    EMPTY,
    ENTIRE,
    Interval,
    IntervalMatrix,
    IntervalVector,
    arith,
    imat_vec,
    intersect,
    midpoint,
    pmat_imat,
    point_inverse,
    radius,
    v_metric,
    w_metric,
    width,
)
from .simplex import LpProblem, LpResult, LpStatus, Simplex, simplex_solve
from .square import (
    PreconditionedSystem,
    SquareOutcome,
    Status,
    gs_step,
    gs_sweep,
    initial_enclosure,
    jacobi_sweep,
    precondition,
    solve_square,
)
from .subsquares import (
    Budget,
    SolveOutcome,
    SubsquareSelection,
    choose_subsquares,
    count_subsquares,
    parallel_sequential_solve,
    sequential_solve,
    simple_solve,
)

__version__ = "0.1.0"
