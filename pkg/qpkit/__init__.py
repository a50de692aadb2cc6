"""
qpkit: quivers with potential, bound quiver algebras and the slice pipeline.

Exact computations over the rationals for Jacobian algebras, Ginzburg
differentials, homological invariants of finite-dimensional algebras,
knitted AR components and the tilting-to-preprojective construction.
"""

__version__ = "0.1.0"
