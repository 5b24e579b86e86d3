"""Low-frequency scattering of TE/TM waves by inhomogeneous 2D strips."""

from . import cloak, dyson, grating, lowfreq, media
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"

__all__ = ["cloak", "dyson", "grating", "lowfreq", "media", "__version__"]
