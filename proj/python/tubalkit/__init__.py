"""Tubal tensor algebra, TNN-ball projection and recovery experiments.

Tensors are numpy arrays of order >= 3; the t-product acts on the first two
axes and all trailing axes are transformed.
"""

import os

# The generic OpenBLAS dispatch picks broken AVX-512 kernels on some CPUs.
os.environ.setdefault("OPENBLAS_CORETYPE", "Haswell")

from ._tubalkit import *  # noqa: E402,F401,F403
from ._tubalkit import (  # noqa: E402
    ConfigError,
    Error,
    NumericalError,
    ShapeMismatch,
)

__version__ = "0.1.0"
