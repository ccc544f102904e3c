"""Physical constants (CODATA 2018) and the gyromagnetic ratio used throughout."""
from __future__ import annotations

from dataclasses import dataclass

import scipy.constants as sc


@dataclass(frozen=True)
class PhysicalConstants:
    gamma: float = 1.76e11          # rad s^-1 T^-1
    mu0: float = sc.mu_0            # T m A^-1
    hbar: float = sc.hbar           # J s
    e_charge: float = sc.e          # C
    kB: float = sc.k                # J K^-1

    def __post_init__(self):
        for name in ("gamma", "mu0", "hbar", "e_charge", "kB"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


CONSTANTS = PhysicalConstants()
