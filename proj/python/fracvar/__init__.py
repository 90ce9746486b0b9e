"""Generalized fractional operators, variational residuals and dissipative dynamics."""

from ._fracvar import (
    ML_Z_MAX,
    Kernel,
    NumericalError,
    a_op,
    b_op,
    dissipative_delta,
    gamma,
    ibp_defect,
    k_op,
    mittag_leffler,
    run_cli,
    simulate_caldirola_kanai,
    solve_volterra,
)

__all__ = [
    "ML_Z_MAX",
    "Kernel",
    "NumericalError",
    "a_op",
    "b_op",
    "dissipative_delta",
    "gamma",
    "ibp_defect",
    "k_op",
    "mittag_leffler",
    "run_cli",
    "simulate_caldirola_kanai",
    "solve_volterra",
]
