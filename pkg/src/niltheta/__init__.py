"""Harmonic analysis on the Kodaira-Thurston nilmanifold and its prequantum bundle.

Modules: lie (group law, lattice, exact matrices), coadjoint (orbits and
subordinate subalgebras), symplectic (forms, Lagrangians, compatible
structures), reps (induced representations), theta (periodizing maps),
ladder (Birkhoff normal form), spectral (filtered Laplacian) and cli.
"""

__version__ = "0.1.0"
