"""Total-spin sector spectra of ferromagnetic Heisenberg chains.

Builds highest-weight arc-diagram bases, assembles sector Hamiltonians,
and checks that minimum energies decrease with total spin.
"""

from .chain import (
    HALF,
    BilinearBiquadratic,
    HalfInteger,
    Heisenberg,
    IncrementStep,
    SpinChainSpec,
    StepKind,
    admissible_spins,
    build_sequence,
    chain,
    max_total_spin,
    multiplicity,
    uniform_chain,
)
from .results import ComparisonVerdict, EnergyTable, FoelReport, Method, Status

__version__ = "0.1.0"

__all__ = [
    "HALF",
    "BilinearBiquadratic",
    "ComparisonVerdict",
    "EnergyTable",
    "FoelReport",
    "HalfInteger",
    "Heisenberg",
    "IncrementStep",
    "Method",
    "SpinChainSpec",
    "Status",
    "StepKind",
    "admissible_spins",
    "build_sequence",
    "chain",
    "max_total_spin",
    "multiplicity",
    "uniform_chain",
]
