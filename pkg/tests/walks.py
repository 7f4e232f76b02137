"""Seeded random animals inside a small box, for implication checks."""
import numpy as np

from gridanimal.topology import is_animal
from gridanimal.voxel import Box, CubeSet


def random_animals(n_states: int, dims=(4, 4, 4), seed: int = 0):
    """Yield animals from a random walk of legal toggles inside ``dims``.

    Each proposed toggle is decided by the full oracle, so every yielded
    set is an animal.
    """
    rng = np.random.default_rng(seed)
    region = list(Box.from_dims(*dims))
    s = CubeSet([region[rng.integers(len(region))]])
    yielded = 0
    while yielded < n_states:
        q = region[rng.integers(len(region))]
        t = s.toggle(q)
        if len(t) and is_animal(t):
            s = t
            yield s
            yielded += 1
