"""pipetrack: wave-front tracking for one-dimensional gas flow in pipes
whose geometry (direction or cross-section) varies along the axis.

The solver evolves piecewise-constant profiles whose jumps travel as
fronts; geometry variation enters through standing zero-waves that carry
a flux correction between the gas states on their two sides.
"""
from ._kernels import active_backend
from .models import EulerModel, GammaLaw, IsentropicModel, PressureLaw

__version__ = "0.1.0"

__all__ = [
    "EulerModel",
    "GammaLaw",
    "IsentropicModel",
    "PressureLaw",
    "active_backend",
    "__version__",
]
