"""Phase-field egg-chamber simulator: multiphase cell geometry, confined
chemoattractant transport, and contact-mediated cluster migration."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
