"""Flat array layouts shared by the compiled and pure-Python kernels.

A free layer is packed into a float64 vector of ``N_PAR`` slots so the inner
loops never touch Python objects. A netlist is flattened into a
``CompiledCircuit`` of contiguous arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

P_HK = 0
P_EASY = slice(1, 4)
P_MEFF = 4
P_ALPHA = 5
P_XI = 6
P_GMU0 = 7
P_HEXT = slice(8, 11)
P_MP = slice(11, 14)
P_SIG = slice(14, 17)
P_POL = 17
P_LAM = 18
P_ETA = 19
P_AREA = 20
P_XSEC = 21
P_SOTSIGN = 22
N_PAR = 24

MONITOR_NONE = 0
MONITOR_MAGNETIZATION = 1
MONITOR_SEPARATION = 2


@dataclass
class CompiledCircuit:
    """Index-based view of a netlist. Free nodes come first, then sources."""

    n_free: int
    n_nodes: int
    node_names: list
    tr_type: np.ndarray
    tr_d: np.ndarray
    tr_g: np.ndarray
    tr_s: np.ndarray
    tr_beta: np.ndarray
    tr_vth: np.ndarray
    tr_alpha: np.ndarray
    tr_lam: np.ndarray
    r_a: np.ndarray
    r_b: np.ndarray
    r_g: np.ndarray
    mj_top: np.ndarray
    mj_bot: np.ndarray
    mj_layer: np.ndarray
    mj_gp: np.ndarray
    mj_tmr: np.ndarray
    mj_vh: np.ndarray
    cap: np.ndarray
    src_ptr: np.ndarray
    src_t: np.ndarray
    src_v: np.ndarray
    ly_mtj: np.ndarray
    ly_res: np.ndarray
    ly_par: np.ndarray
    supply: int
