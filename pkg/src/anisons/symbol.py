"""Multiplier indices and the anisotropic dissipation symbol.

The dissipative operator acts on component ``u_j`` as multiplication by
``-D_j(xi)`` in Fourier space, with

    D_1 = D_2 = |xi_1|^{2 beta}  + |xi_2|^{2 beta}  + |xi_3|^{2 alpha}
    D_3       = |xi_1|^{2 gamma} + |xi_2|^{2 gamma} + |xi_3|^{2 alpha}

The viscosity is fixed to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import WavenumberLattice
from .spectral import fractional_power

VARIANTS = ("standard", "laplacian_plus")


@dataclass(frozen=True)
class MultiplierIndices:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (v >= 0 and np.isfinite(v)):
                raise ValueError(f"{name} must be a finite number >= 0, got {v!r}")

    @property
    def theorem_regime(self) -> bool:
        """True for alpha >= 3/2, beta = 1, 5/4 <= gamma <= alpha."""
        return (
            self.alpha >= 1.5
            and self.beta == 1
            and self.gamma >= 1.25
            and self.gamma <= self.alpha
        )

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "theorem_regime": self.theorem_regime,
        }


@dataclass(frozen=True, eq=False)
class DissipationSymbol:
    """Per-component symbols, array of shape ``(3, n1, n2, n3 // 2 + 1)``."""

    values: np.ndarray

    def __getitem__(self, j: int) -> np.ndarray:
        return self.values[j]

    @classmethod
    def zero(cls, lattice: WavenumberLattice) -> "DissipationSymbol":
        return cls(np.zeros((3,) + lattice.shape))


def dissipation_symbol(
    indices: MultiplierIndices,
    lattice: WavenumberLattice,
    variant: str = "standard",
) -> DissipationSymbol:
    """Evaluate ``D_1, D_2, D_3`` on the lattice.

    ``variant="laplacian_plus"`` gives the weaker operator
    ``Delta u - (M3^{2a} u1, M3^{2a} u2, (M1^{2g} + M2^{2g} + M3^{2a}) u3)``.
    It is provided at the symbol level only.

    The zero mode is always assigned ``D_j = 0`` so the mean flow is not
    damped, even for degenerate zero exponents.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown symbol variant {variant!r}")
    xi1, xi2, xi3 = lattice.xi
    vert = fractional_power(xi3, 2 * indices.alpha)
    if variant == "standard":
        horiz_12 = fractional_power(xi1, 2 * indices.beta) + fractional_power(
            xi2, 2 * indices.beta
        )
        horiz_3 = fractional_power(xi1, 2 * indices.gamma) + fractional_power(
            xi2, 2 * indices.gamma
        )
        d12 = horiz_12 + vert
        d3 = horiz_3 + vert
    else:
        lap = lattice.xi_sq
        d12 = lap + vert
        d3 = (
            lap
            + fractional_power(xi1, 2 * indices.gamma)
            + fractional_power(xi2, 2 * indices.gamma)
            + vert
        )
    values = np.stack(
        [np.broadcast_to(d, lattice.shape) for d in (d12, d12, d3)]
    ).astype(float)
    values[:, lattice.xi_sq == 0] = 0.0
    return DissipationSymbol(values)
