"""Exact toolkit for exceptional divisors of surface blow-ups.

Submodules: :mod:`~exdiv.lattice` (proximity forests, the exceptional
lattice), :mod:`~exdiv.divisors` (genus, connectedness, contracted
classes), :mod:`~exdiv.dynkin` (A-D-E recognition, fundamental cycles),
:mod:`~exdiv.budget` (singularity budgets), :mod:`~exdiv.propcheck`
(proposition suite) and :mod:`~exdiv.cli`.
"""
from ._backend import BACKEND
from .lattice import Divisor, ExceptionalLattice, ProximityForest, build_lattice, parse_forest

__version__ = "0.1.0"

__all__ = ["BACKEND", "Divisor", "ExceptionalLattice", "ProximityForest", "build_lattice", "parse_forest"]
