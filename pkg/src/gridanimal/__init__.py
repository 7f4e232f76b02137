"""Grid-cube animals: construction of a blocked animal and its verification."""
from ._kernels import BACKEND
from .voxel import Box, Cube, CubeSet

__version__ = "0.1.0"
__all__ = ["BACKEND", "Box", "Cube", "CubeSet", "__version__"]
