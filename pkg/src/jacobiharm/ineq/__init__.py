"""Norm inequalities, multiplier bounds and smoothness classes on the spectral side."""

from .bounds import *  # noqa: F401,F403
from .bounds import __all__ as _bounds_all
from .lipschitz import *  # noqa: F401,F403
from .lipschitz import __all__ as _lipschitz_all
from .model import SpectralModel, spectral_model

__all__ = list(_bounds_all) + list(_lipschitz_all) + ["SpectralModel", "spectral_model"]
