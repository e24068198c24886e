"""Exact local densities and Hirzebruch-Mumford volumes of integral lattices."""

from .lattice import GramMatrix, direct_sum, invariants
from .density import brute_force_density, density
from .jordan import jordan_decompose
from .volume import closed_form_ternary, siegel_volume
from .watson import reduce_to_square_free

__version__ = "0.1.0"
