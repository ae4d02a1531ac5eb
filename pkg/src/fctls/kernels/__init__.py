"""Kernel namespace: numba-compiled or plain NumPy per ``FCTLS_BACKEND``."""

from ._backend import BACKEND, pure
from ._ops import (
    COV_MIN_EIG_FLOOR,
    FF_COV_SLICE,
    FF_THETA_SLICE,
    FF_Z_INDEX,
    GRAD_THETA_SLICE,
    PLANT_SLICE,
    SIM_COV_NOT_PD,
    SIM_NON_FINITE,
    SIM_OK,
    STATE_SIZE,
    STD_COV_SLICE,
    STD_THETA_SLICE,
    coupled_rhs,
    fct_evaluate,
    frobenius_norm,
    gradient_rate,
    gram_step,
    initial_state,
    ls_ff_rates,
    ls_standard_rates,
    outer_product,
    pack_sym,
    plant_emit,
    plant_rates,
    simulate_benchmark,
    spectral_norm_sym,
    sym_eig_bounds,
    unpack_sym,
)

__all__ = [
    "BACKEND",
    "pure",
    "COV_MIN_EIG_FLOOR",
    "STATE_SIZE",
    "PLANT_SLICE",
    "FF_THETA_SLICE",
    "FF_COV_SLICE",
    "FF_Z_INDEX",
    "STD_THETA_SLICE",
    "STD_COV_SLICE",
    "GRAD_THETA_SLICE",
    "SIM_OK",
    "SIM_COV_NOT_PD",
    "SIM_NON_FINITE",
    "coupled_rhs",
    "fct_evaluate",
    "frobenius_norm",
    "gradient_rate",
    "gram_step",
    "initial_state",
    "ls_ff_rates",
    "ls_standard_rates",
    "outer_product",
    "pack_sym",
    "plant_emit",
    "plant_rates",
    "simulate_benchmark",
    "spectral_norm_sym",
    "sym_eig_bounds",
    "unpack_sym",
]
