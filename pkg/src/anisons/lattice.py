"""Periodic grid and its integer-frequency lattice.

Fields live on the L-periodic 3-torus sampled at ``n1 x n2 x n3`` points.
Spectral coefficients are stored as a half spectrum along the last axis
(``numpy.fft.rfftn`` layout, shape ``(n1, n2, n3 // 2 + 1)``), so every
stored array corresponds to a real field by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on the cube ``[0, box_length)^3``."""

    n1: int
    n2: int
    n3: int
    box_length: float = 2 * math.pi

    def __post_init__(self):
        for name in ("n1", "n2", "n3"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise TypeError(f"{name} must be an integer, got {n!r}")
            if n < 4:
                raise ValueError(f"{name} must be >= 4, got {n}")
            if n % 2:
                raise ValueError(f"{name} must be even, got {n}")
        if not (self.box_length > 0 and math.isfinite(self.box_length)):
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    @classmethod
    def cube(cls, n: int, box_length: float = 2 * math.pi) -> "GridSpec":
        return cls(n, n, n, box_length)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    @property
    def spectral_shape(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3 // 2 + 1)

    @property
    def npoints(self) -> int:
        return self.n1 * self.n2 * self.n3

    @property
    def volume(self) -> float:
        return self.box_length**3

    @property
    def cell_volume(self) -> float:
        return self.volume / self.npoints

    def coordinates(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable physical coordinates ``x1, x2, x3``."""
        L = self.box_length
        x1 = (np.arange(self.n1) * (L / self.n1)).reshape(-1, 1, 1)
        x2 = (np.arange(self.n2) * (L / self.n2)).reshape(1, -1, 1)
        x3 = (np.arange(self.n3) * (L / self.n3)).reshape(1, 1, -1)
        return x1, x2, x3


@dataclass(frozen=True, eq=False)
class WavenumberLattice:
    """Frequencies, multiplicities and the dealias mask for one grid.

    Attributes:
        grid: the grid this lattice discretizes
        freqs: per-axis 1D frequency arrays ``xi_i(k) = (2 pi / L) k`` in the
            full FFT ordering (``0, 1, ..., n/2 - 1, -n/2, ..., -1``)
        modes: per-axis 1D integer mode numbers in the same ordering
        xi: broadcastable frequency arrays on the stored half spectrum
        kint: broadcastable integer mode numbers on the half spectrum
        dxi: like ``xi`` but with the Nyquist entry zeroed; used for odd
            (first-derivative) operators so real fields stay real
        xi_sq: ``|xi|^2`` on the half spectrum
        weight: multiplicity of each stored mode in the full spectrum
            (1 on the ``k3 = 0`` and ``k3 = n3/2`` planes, 2 elsewhere)
        dealias_mask: True where ``|k_i| <= n_i // 3`` on every axis
    """

    grid: GridSpec
    freqs: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    modes: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    xi: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    kint: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    dxi: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    xi_sq: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)
    dealias_mask: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.grid.spectral_shape


def _axis_modes(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


def build_lattice(grid: GridSpec) -> WavenumberLattice:
    """Build the wavenumber lattice for ``grid``.

    >>> lat = build_lattice(GridSpec.cube(8))
    >>> lat.modes[0].tolist()
    [0, 1, 2, 3, -4, -3, -2, -1]
    """
    if not isinstance(grid, GridSpec):
        raise TypeError("build_lattice expects a GridSpec")
    scale = 2 * np.pi / grid.box_length
    n = grid.shape
    modes = tuple(_axis_modes(m) for m in n)
    freqs = tuple(scale * m.astype(float) for m in modes)

    half3 = np.arange(n[2] // 2 + 1, dtype=np.int64)
    k1 = modes[0].reshape(-1, 1, 1)
    k2 = modes[1].reshape(1, -1, 1)
    k3 = half3.reshape(1, 1, -1)
    kint = (k1, k2, k3)
    xi = tuple(scale * k.astype(float) for k in kint)

    dxi = []
    for axis, (k, m) in enumerate(zip(kint, n)):
        d = scale * k.astype(float)
        d = np.where(np.abs(k) == m // 2, 0.0, d)
        dxi.append(d)

    xi_sq = xi[0] ** 2 + xi[1] ** 2 + xi[2] ** 2

    weight = np.full(n[2] // 2 + 1, 2.0)
    weight[0] = 1.0
    weight[-1] = 1.0
    weight = np.broadcast_to(weight.reshape(1, 1, -1), grid.spectral_shape).copy()

    cut = [m // 3 for m in n]
    dealias_mask = (
        (np.abs(k1) <= cut[0]) & (np.abs(k2) <= cut[1]) & (np.abs(k3) <= cut[2])
    )
    dealias_mask = np.broadcast_to(dealias_mask, grid.spectral_shape).copy()

    return WavenumberLattice(
        grid=grid,
        freqs=freqs,
        modes=modes,
        xi=xi,
        kint=kint,
        dxi=tuple(dxi),
        xi_sq=np.broadcast_to(xi_sq, grid.spectral_shape).copy(),
        weight=weight,
        dealias_mask=dealias_mask,
    )
