"""Partial-sparse channel estimation for two-slot amplify-and-forward relay links.

Submodules
----------
channel   sparse/dense channel generation and the cascaded composite channel
afsim     two-slot AF simulation and the frequency-domain linear model
solvers   LS and weighted-LASSO (SEL/PEL/IEL) estimators
csdiag    restricted isometry diagnostics
harness   Monte Carlo sweeps, metrics, calibration, CSV emission
"""

__version__ = "0.1.0"

from . import afsim, channel, csdiag, harness, solvers  # noqa: E402,F401
from ._backend import BACKEND  # noqa: F401
