"""Exponential and IMEX time integrators for the projected linear operator.

The dissipation symbol is diagonal in the velocity *components* but is not a
multiple of the identity, so it does not commute with the Leray projector.
The linear operator acting on divergence-free fields is therefore the
symmetric per-mode 3x3 matrix ``L(xi) = P(xi) D(xi) P(xi)``. Its matrix
functions (exponential, phi-functions, Cayley transform) are formed once per
time step size from a batched eigendecomposition. Whenever the velocity of a
mode is an eigenvector of ``L`` (shear flows, the isotropic case) this is the
scalar factor ``exp(-D_j dt)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import WavenumberLattice
from .symbol import DissipationSymbol

INTEGRATORS = ("etd1", "etdrk2", "imex_cn")

_SERIES_RADIUS = 0.2
_SERIES_TERMS = 16


def phi1(z: np.ndarray) -> np.ndarray:
    """``(exp(z) - 1) / z`` with ``phi1(0) = 1``."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def phi2(z: np.ndarray) -> np.ndarray:
    """``(exp(z) - 1 - z) / z**2`` with ``phi2(0) = 1/2``; Taylor series near 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small]
    acc = np.zeros_like(zs)
    for k in reversed(range(_SERIES_TERMS)):
        acc = acc * zs + 1.0 / math.factorial(k + 2)
    out[small] = acc
    zb = z[~small]
    out[~small] = (np.expm1(zb) - zb) / zb**2
    return out


def projected_operator(symbol: DissipationSymbol, lattice: WavenumberLattice) -> np.ndarray:
    """Per-mode ``P D P`` with shape ``lattice.shape + (3, 3)``."""
    xi = np.stack([np.broadcast_to(x, lattice.shape) for x in lattice.xi], axis=-1)
    xi_sq = lattice.xi_sq[..., None, None]
    outer = xi[..., :, None] * xi[..., None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        proj = np.where(xi_sq > 0, np.eye(3) - outer / np.where(xi_sq > 0, xi_sq, 1.0), np.eye(3))
    d = np.moveaxis(symbol.values, 0, -1)
    op = proj @ (d[..., :, None] * proj)
    return 0.5 * (op + np.swapaxes(op, -1, -2))


def _matrix_function(evals: np.ndarray, evecs: np.ndarray, values: np.ndarray) -> np.ndarray:
    # V diag(f) V^T, returned as (3, 3, n1, n2, n3h) for einsum application
    m = (evecs * values[..., None, :]) @ np.swapaxes(evecs, -1, -2)
    return np.moveaxis(m, (-2, -1), (0, 1)).copy()


def apply_matrix(mat: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Per-mode matrix-vector product for ``mat`` of shape ``(3, 3) + modes``."""
    return np.einsum("ijxyz,jxyz->ixyz", mat, u)


@dataclass(frozen=True, eq=False)
class LinearPropagator:
    """Precomputed per-mode matrices for one (symbol, dt, scheme) triple.

    For the exponential schemes ``a`` is ``exp(-dt L)``, ``b`` is
    ``dt phi1(-dt L)`` and ``c`` is ``dt phi2(-dt L)``. For ``imex_cn``
    ``a`` is ``(I + dt L/2)^-1 (I - dt L/2)`` and ``b`` is
    ``dt (I + dt L/2)^-1``; ``c`` is unused.
    """

    scheme: str
    dt: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray | None


def build_propagator(
    symbol: DissipationSymbol, lattice: WavenumberLattice, dt: float, scheme: str
) -> LinearPropagator:
    if scheme not in INTEGRATORS:
        raise ValueError(f"unknown integrator {scheme!r}; choose from {INTEGRATORS}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    evals, evecs = np.linalg.eigh(projected_operator(symbol, lattice))
    evals = np.clip(evals, 0.0, None)
    z = -dt * evals
    if scheme == "imex_cn":
        denom = 1.0 + 0.5 * dt * evals
        a = _matrix_function(evals, evecs, (1.0 - 0.5 * dt * evals) / denom)
        b = _matrix_function(evals, evecs, dt / denom)
        return LinearPropagator(scheme, dt, a, b, None)
    a = _matrix_function(evals, evecs, np.exp(z))
    b = _matrix_function(evals, evecs, dt * phi1(z))
    c = _matrix_function(evals, evecs, dt * phi2(z)) if scheme == "etdrk2" else None
    return LinearPropagator(scheme, dt, a, b, c)
