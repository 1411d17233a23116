from .grid import Grid, GridError, MAX_CELLS, make_grid
from .state import (
    Potential,
    StateError,
    WaveFunction,
    current,
    density,
    fidelity,
    gaussian_packet,
    gradient,
    inner,
    normalize,
    plane_wave,
)
from .evolve import (
    EvolutionRecord,
    EvolveError,
    SplitStepper,
    continuity_residual,
    cosine_absorber,
    divergence,
    evolve,
    reverse_evolve,
    step_split,
)
from .io import load_record, save_record

__all__ = [
    "Grid", "GridError", "MAX_CELLS", "make_grid",
    "Potential", "StateError", "WaveFunction",
    "current", "density", "fidelity", "gaussian_packet", "gradient",
    "inner", "normalize", "plane_wave",
    "EvolutionRecord", "EvolveError", "SplitStepper",
    "continuity_residual", "cosine_absorber", "divergence",
    "evolve", "reverse_evolve", "step_split",
    "load_record", "save_record",
]
