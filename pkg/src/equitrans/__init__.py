"""equitrans: finite-scale equivariant transversality toolkit.

Subpackages cover compact-group representations and isotypic projectors,
equivariant bundles over simplicial bases, the transversality index
calculus, spectral-flow Fredholm indices, Novikov-coefficient chain
complexes, and finite groupoid quotients with quotient metrics.
"""

__version__ = "0.1.0"
