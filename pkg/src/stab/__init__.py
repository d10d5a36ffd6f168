"""Variational stability laboratory for Ginzburg-Landau and abelian Higgs energies on spheres."""
__version__ = "0.1.0"
