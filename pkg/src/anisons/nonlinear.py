"""Pseudospectral advection term."""

from __future__ import annotations

import numpy as np

from .lattice import WavenumberLattice
from .spectral import dealias, from_spectral, gradient, leray_project, to_spectral


def velocity_gradient(u: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Physical samples of ``G[i, k] = d_k u_i``, shape ``(3, 3) + grid``."""
    grads = np.stack([gradient(u[i], lattice) for i in range(3)])
    return from_spectral(grads, lattice)


def nonlinear_term(u: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Leray projection of ``-(u . grad) u``, dealiased.

    Derivatives are taken spectrally, the product is formed on the grid and
    transformed back. For input inside the 2/3 mask the retained modes are
    free of aliasing.
    """
    phys = from_spectral(u, lattice)
    grad = velocity_gradient(u, lattice)
    # adv_j = sum_i u_i d_i u_j
    adv = np.einsum("ixyz,jixyz->jxyz", phys, grad)
    return leray_project(dealias(-to_spectral(adv, lattice), lattice), lattice)
