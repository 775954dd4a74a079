"""Transforms, Fourier multipliers, dealiasing and Leray projection.

Normalization convention: spectral coefficients are Fourier-series
coefficients,

    F_k = (1/N) sum_x f(x) exp(-i xi_k . x),      f(x) = sum_k F_k exp(i xi_k . x),

with ``N = n1 n2 n3``. Parseval then reads

    sum_x f(x)^2 (L/n)^3 = V * sum_k |F_k|^2,      V = L^3,

i.e. the constant ``c`` relating the quadrature L2 norm to the coefficient
sum is the box volume. All norms and inner products in this package go
through :func:`inner` / :func:`norm_sq`, which apply that constant and the
half-spectrum multiplicities, so the convention cannot leak.

Arrays with leading axes (e.g. a velocity of shape ``(3, n1, n2, n3h)``)
are accepted wherever a scalar coefficient array is.
"""

from __future__ import annotations

import numpy as np

from .lattice import WavenumberLattice

__all__ = [
    "to_spectral",
    "from_spectral",
    "symmetrize",
    "fractional_power",
    "apply_multiplier",
    "dealias",
    "leray_project",
    "divergence",
    "divergence_error",
    "derivative",
    "gradient",
    "inner",
    "norm_sq",
    "l2_norm",
    "physical_l2_sq",
]


def _check_physical(f: np.ndarray, lattice: WavenumberLattice) -> None:
    if f.shape[-3:] != lattice.grid.shape:
        raise ValueError(
            f"field shape {f.shape} does not match grid {lattice.grid.shape}"
        )


def _check_spectral(F: np.ndarray, lattice: WavenumberLattice) -> None:
    if F.shape[-3:] != lattice.shape:
        raise ValueError(
            f"coefficient shape {F.shape} does not match lattice {lattice.shape}"
        )


def to_spectral(f: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Real samples -> half-spectrum Fourier-series coefficients."""
    f = np.asarray(f)
    _check_physical(f, lattice)
    if np.iscomplexobj(f):
        raise ValueError("physical fields must be real")
    return np.fft.rfftn(f, axes=(-3, -2, -1)) / lattice.grid.npoints


def from_spectral(F: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Half-spectrum coefficients -> real samples on the grid."""
    F = np.asarray(F)
    _check_spectral(F, lattice)
    return np.fft.irfftn(
        F * lattice.grid.npoints, s=lattice.grid.shape, axes=(-3, -2, -1)
    )


def symmetrize(F: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Project arbitrary half-spectrum data onto coefficients of a real field.

    Only the self-conjugate planes ``k3 = 0`` and ``k3 = n3/2`` carry a
    constraint; a round trip through physical space enforces it.
    """
    return to_spectral(from_spectral(F, lattice), lattice)


def fractional_power(abs_xi: np.ndarray, exponent: float) -> np.ndarray:
    """``|xi|**exponent`` with the zero-frequency convention ``|0|**e = 0`` for e > 0."""
    if exponent < 0:
        raise ValueError(f"multiplier exponent must be >= 0, got {exponent}")
    abs_xi = np.abs(np.asarray(abs_xi, dtype=float))
    if exponent == 0:
        return np.ones_like(abs_xi)
    out = np.zeros_like(abs_xi)
    nz = abs_xi > 0
    out[nz] = abs_xi[nz] ** exponent
    return out


def apply_multiplier(
    F: np.ndarray, lattice: WavenumberLattice, axis: int, exponent: float
) -> np.ndarray:
    """Multiply coefficients by ``|xi_axis|**exponent`` (axis is 1, 2 or 3).

    ``exponent`` is the full power, so the operator written M_3^{2a} uses
    ``apply_multiplier(F, lattice, 3, 2 * a)``.
    """
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    _check_spectral(F, lattice)
    return F * fractional_power(lattice.xi[axis - 1], exponent)


def dealias(F: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Zero every coefficient outside the 2/3-rule mask."""
    _check_spectral(F, lattice)
    return np.where(lattice.dealias_mask, F, 0)


def _safe_inverse_xi_sq(lattice: WavenumberLattice) -> np.ndarray:
    inv = np.zeros(lattice.shape)
    nz = lattice.xi_sq > 0
    inv[nz] = 1.0 / lattice.xi_sq[nz]
    return inv


def leray_project(u: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Project a spectral velocity ``(3, ...)`` onto divergence-free fields.

    ``u <- u - xi (xi . u) / |xi|^2`` for ``xi != 0``; the mean flow is
    passed through unchanged.
    """
    if u.shape[0] != 3:
        raise ValueError("leray_project expects three velocity components")
    _check_spectral(u, lattice)
    xi = lattice.xi
    div = xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2]
    div_scaled = div * _safe_inverse_xi_sq(lattice)
    return np.stack([u[i] - xi[i] * div_scaled for i in range(3)])


def divergence(u: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Spectral coefficients of ``div u`` (up to the factor i)."""
    xi = lattice.xi
    return xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2]


def divergence_error(u: np.ndarray, lattice: WavenumberLattice) -> float:
    """``max_k |xi . u(k)| / |xi| |u(k)|`` over modes with nonzero velocity."""
    xi_norm = np.sqrt(lattice.xi_sq)
    mag = np.sqrt(np.sum(np.abs(u) ** 2, axis=0))
    num = np.abs(divergence(u, lattice))
    nz = (mag > 0) & (xi_norm > 0)
    if not np.any(nz):
        return 0.0
    return float(np.max(num[nz] / (xi_norm[nz] * mag[nz])))


def derivative(F: np.ndarray, lattice: WavenumberLattice, axis: int) -> np.ndarray:
    """Spectral ``d/dx_axis`` (axis 1, 2 or 3); the Nyquist mode maps to zero."""
    return 1j * lattice.dxi[axis - 1] * F


def gradient(F: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Stack ``(d1 F, d2 F, d3 F)`` along a new leading axis."""
    return np.stack([derivative(F, lattice, a) for a in (1, 2, 3)])


def inner(F: np.ndarray, G: np.ndarray, lattice: WavenumberLattice) -> float:
    """L2 inner product of the real fields with coefficients F and G.

    Leading axes (components) are summed over.
    """
    _check_spectral(F, lattice)
    prod = np.real(F * np.conj(G)) * lattice.weight
    return float(lattice.grid.volume * np.sum(prod))


def norm_sq(F: np.ndarray, lattice: WavenumberLattice, weight: np.ndarray | None = None) -> float:
    """Squared L2 norm, optionally with a nonnegative Fourier weight."""
    _check_spectral(F, lattice)
    dens = np.abs(F) ** 2
    if weight is not None:
        dens = dens * weight
    return float(lattice.grid.volume * np.sum(dens * lattice.weight))


def l2_norm(F: np.ndarray, lattice: WavenumberLattice) -> float:
    return float(np.sqrt(norm_sq(F, lattice)))


def physical_l2_sq(f: np.ndarray, lattice: WavenumberLattice) -> float:
    """Trapezoid-rule ``int f^2 dx`` computed directly from samples."""
    _check_physical(f, lattice)
    return float(np.sum(np.asarray(f) ** 2) * lattice.grid.cell_volume)
