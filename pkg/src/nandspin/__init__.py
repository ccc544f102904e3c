"""Device/circuit co-simulation of NAND-SPIN non-volatile flip-flops."""
from nandspin.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
