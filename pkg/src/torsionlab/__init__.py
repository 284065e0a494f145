"""torsionlab: polynomial Pell equations, torsion parameters, and semi-abelian logarithms."""

__version__ = "0.1.0"
