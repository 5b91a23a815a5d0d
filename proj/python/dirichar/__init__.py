"""Dirichlet characterization toolkit: densities, reparameterizations,
functional-equation checks, network scores and independence tests."""

from ._dirichar import *  # noqa: F401,F403

__version__ = "0.1.0"
