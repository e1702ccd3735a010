"""Knapsack and maximum-search Hamiltonians for adiabatic quantum computing.

Submodules: ``knapcore`` (classical solvers), ``encode`` (QUBO/Ising
encodings), ``spectral`` and ``lanczos`` (gap sweeps), ``dilog`` and
``phasetrans`` (subset-sum phase boundary), ``plotting`` and ``cli``.
"""

from .encode import (
    EncodingMap,
    IsingModel,
    QuadraticBinaryModel,
    build_log_knapsack,
    build_search_model,
    build_unary_knapsack,
    to_ising,
)
from .knapcore import KnapsackInstance, KnapsackSolution, solve_brute, solve_dp, solve_greedy, validate_instance
from .spectral import DriverSpec, GapCurve, diagonalize_problem, lowest_two, sweep_gap

__version__ = "0.1.0"
