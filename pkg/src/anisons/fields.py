"""Band-limited random fields defined independently of the grid.

A field is drawn on a canonical cube of integer modes ``[-kmax, kmax]^3``
and then embedded into any lattice that can represent it. Refining the grid
therefore evaluates the *same* trigonometric polynomial on more points,
which is what refinement-stability studies need.
"""

from __future__ import annotations

import numpy as np

from .lattice import WavenumberLattice


def _mode_grid(kmax: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r = np.arange(-kmax, kmax + 1)
    return np.meshgrid(r, r, r, indexing="ij")


def random_cube(
    rng: np.random.Generator,
    kmax: int,
    *,
    kmin: float = 1.0,
    components: int = 1,
    slope: float | None = None,
    drop_horizontal_mean: bool = False,
) -> np.ndarray:
    """Gaussian coefficients on the cube ``[-kmax, kmax]^3`` of one real field.

    Modes with integer radius outside ``[kmin, kmax]`` are zero. With ``slope``
    set, the amplitude follows ``|k|**((slope - 2) / 2)`` so that the shell
    energy spectrum scales like ``k**slope``. ``drop_horizontal_mean`` removes
    every mode with ``k1 = k2 = 0``.

    Returns an array of shape ``(components, 2 kmax + 1, 2 kmax + 1, 2 kmax + 1)``
    with Hermitian symmetry ``c[-k] = conj(c[k])``.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    k1, k2, k3 = _mode_grid(kmax)
    radius = np.sqrt(k1**2 + k2**2 + k3**2)
    keep = (radius >= kmin) & (radius <= kmax) & (radius > 0)
    if drop_horizontal_mean:
        keep &= (k1 != 0) | (k2 != 0)
    shape = (components,) + k1.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    amp = np.where(keep, 1.0, 0.0)
    if slope is not None:
        with np.errstate(divide="ignore"):
            amp = np.where(keep, radius ** ((slope - 2.0) / 2.0), 0.0)
    c = c * amp
    flipped = np.conj(c[:, ::-1, ::-1, ::-1])
    return 0.5 * (c + flipped)


def embed_cube(cube: np.ndarray, lattice: WavenumberLattice) -> np.ndarray:
    """Place cube coefficients into the half-spectrum layout of ``lattice``."""
    kmax = (cube.shape[-1] - 1) // 2
    grid = lattice.grid
    if 2 * kmax >= min(grid.shape):
        raise ValueError(
            f"grid {grid.shape} cannot represent modes up to |k_i| = {kmax}"
        )
    lead = cube.shape[:-3]
    full = np.zeros(lead + grid.shape, dtype=complex)
    r = np.arange(-kmax, kmax + 1)
    i1 = r % grid.n1
    i2 = r % grid.n2
    i3 = r % grid.n3
    full[..., i1[:, None, None], i2[None, :, None], i3[None, None, :]] = cube
    return full[..., : grid.n3 // 2 + 1].copy()
