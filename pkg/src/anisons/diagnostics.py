"""Energy functionals and integral identities of the energy method.

All quadratic functionals are evaluated in Fourier space through
:func:`anisons.spectral.norm_sq`; triple-product integrals are evaluated on
the grid after spectral differentiation.

The horizontal dissipation of ``u_1, u_2`` is written with the general
exponent ``beta`` (``|xi_1|^{2 beta} + |xi_2|^{2 beta}``). For ``beta = 1``
it is exactly the ``grad_h`` form, and for any ``beta`` the sum
``m1 + m2 + m3`` equals ``sum_j <D_j u_j, u_j>``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .lattice import WavenumberLattice
from .nonlinear import velocity_gradient
from .spectral import divergence_error, fractional_power, from_spectral, norm_sq
from .symbol import MultiplierIndices

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "t",
    "l2_sq",
    "m1",
    "m2",
    "m3",
    "grad_sq",
    "mt1",
    "mt2",
    "mt3",
    "e_s",
    "mh1",
    "mh2",
    "mh3",
    "vortex_stretch",
    "balance_residual",
)


@dataclass
class EnergyReport:
    t: float
    l2_sq: float
    m1: float
    m2: float
    m3: float
    grad_sq: float
    mt1: float
    mt2: float
    mt3: float
    e_s: float
    mh1: float
    mh2: float
    mh3: float
    vortex_stretch: float
    balance_residual: float = 0.0
    theorem_regime: bool = False

    @property
    def m(self) -> float:
        return self.m1 + self.m2 + self.m3

    @property
    def mt(self) -> float:
        return self.mt1 + self.mt2 + self.mt3

    @property
    def mh(self) -> float:
        return self.mh1 + self.mh2 + self.mh3

    def row(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, c)) for c in CSV_COLUMNS)

    @classmethod
    def from_row(cls, values: Sequence[float], theorem_regime: bool = False) -> "EnergyReport":
        return cls(**dict(zip(CSV_COLUMNS, map(float, values))), theorem_regime=theorem_regime)

    def as_dict(self) -> dict:
        return asdict(self)


def _horizontal(lattice: WavenumberLattice, exponent: float) -> np.ndarray:
    xi1, xi2, _ = lattice.xi
    return fractional_power(xi1, exponent) + fractional_power(xi2, exponent)


def _weighted_terms(
    u: np.ndarray,
    lattice: WavenumberLattice,
    indices: MultiplierIndices,
    radial: np.ndarray | None,
) -> tuple[float, float, float]:
    h_beta = _horizontal(lattice, 2 * indices.beta)
    h_gamma = _horizontal(lattice, 2 * indices.gamma)
    vert = fractional_power(lattice.xi[2], 2 * indices.alpha)
    if radial is not None:
        h_beta = h_beta * radial
        h_gamma = h_gamma * radial
        vert = vert * radial
    t1 = norm_sq(u[:2], lattice, h_beta)
    t2 = norm_sq(u[2], lattice, h_gamma)
    t3 = norm_sq(u, lattice, vert)
    return t1, t2, t3


def m_terms(u: np.ndarray, lattice: WavenumberLattice, indices: MultiplierIndices):
    """``(m1, m2, m3)``: horizontal, u_3-horizontal and vertical dissipation."""
    return _weighted_terms(u, lattice, indices, None)


def mtilde_terms(u: np.ndarray, lattice: WavenumberLattice, indices: MultiplierIndices):
    """The m-terms with the extra gradient weight ``|xi|^2``."""
    return _weighted_terms(u, lattice, indices, lattice.xi_sq)


def _radial_weight(lattice: WavenumberLattice, s: float) -> np.ndarray:
    if s < 0:
        raise ValueError(f"Sobolev order must be >= 0, got {s}")
    # xi_sq ** s keeps s = 0 and s = 1 bitwise equal to the unweighted forms
    return lattice.xi_sq**s


def mhat_terms(
    u: np.ndarray, lattice: WavenumberLattice, indices: MultiplierIndices, s: float
):
    """The m-terms with weight ``|xi|^{2s}`` (``grad^s`` is the multiplier ``|xi|^s``)."""
    return _weighted_terms(u, lattice, indices, _radial_weight(lattice, s))


def e_s(u: np.ndarray, lattice: WavenumberLattice, s: float) -> float:
    """``||grad^s u||^2 + ||u||^2``."""
    return norm_sq(u, lattice, 1.0 + _radial_weight(lattice, s))


def grad_sq(u: np.ndarray, lattice: WavenumberLattice) -> float:
    return norm_sq(u, lattice, lattice.xi_sq)


def _quad(f: np.ndarray, lattice: WavenumberLattice) -> float:
    return float(np.sum(f) * lattice.grid.cell_volume)


def _check_incompressible(u: np.ndarray, lattice: WavenumberLattice, what: str) -> None:
    err = divergence_error(u, lattice)
    if err > 1e-10:
        log.warning("%s: velocity divergence %.3e exceeds 1e-10", what, err)


def stretching_total(u: np.ndarray, lattice: WavenumberLattice, grad: np.ndarray | None = None) -> float:
    """``sum_{ijk} int d_k u_i d_i u_j d_k u_j dx``."""
    if grad is None:
        grad = velocity_gradient(u, lattice)
    # G[i,k] = d_k u_i
    dens = np.einsum("ikxyz,jixyz,jkxyz->xyz", grad, grad, grad)
    return _quad(dens, lattice)


def vortex_stretching(u: np.ndarray, lattice: WavenumberLattice) -> float:
    """Right-hand side of the H^1 balance, ``d/dt ||grad u||^2/2 + mt = this``.

    Equal to ``-sum_{ijk} int d_k u_i d_i u_j d_k u_j dx``.
    """
    return -stretching_total(u, lattice)


def advective_h1_form(u: np.ndarray, lattice: WavenumberLattice) -> float:
    """``int (u . grad u) . Laplacian u dx`` before integration by parts."""
    phys = from_spectral(u, lattice)
    grad = velocity_gradient(u, lattice)
    lap = from_spectral(-lattice.xi_sq * u, lattice)
    dens = np.einsum("ixyz,jixyz,jxyz->xyz", phys, grad, lap)
    return _quad(dens, lattice)


def kukavica_split(u: np.ndarray, lattice: WavenumberLattice) -> tuple[float, float, float]:
    """Split the stretching sum into its horizontal part ``A`` and the rest ``B``.

    Returns ``(A, B, A_rhs)`` where ``A_rhs`` is the rewriting of ``A`` that
    isolates ``d_3 u_3``::

        A_rhs = - sum_{i,j<=2} int (d_i u_j)^2 d_3 u_3
                + int d_1 u_1 d_2 u_2 d_3 u_3 - int d_1 u_2 d_2 u_1 d_3 u_3

    ``A = A_rhs`` requires incompressibility.
    """
    _check_incompressible(u, lattice, "kukavica_split")
    g = velocity_gradient(u, lattice)
    total = stretching_total(u, lattice, g)
    h = g[:2, :2]
    a = _quad(np.einsum("ikxyz,jixyz,jkxyz->xyz", h, h, h), lattice)
    d33 = g[2, 2]
    rhs = (
        -_quad(np.sum(h**2, axis=(0, 1)) * d33, lattice)
        + _quad(g[0, 0] * g[1, 1] * d33, lattice)
        - _quad(g[1, 0] * g[0, 1] * d33, lattice)
    )
    return a, total - a, rhs


@dataclass
class DominationSplit:
    """Pieces of ``||grad^{s+1} u||^2`` split by horizontal/vertical frequency.

    ``first`` equals ``mh1`` for beta = 1; ``second`` is bounded by
    ``C2 (lower_second + mh2)`` and ``third`` by ``C3 (lower_third + mh3)``
    with lower-order terms ``||grad^s u_3||^2`` and ``||grad^s u||^2``.
    """

    total: float
    first: float
    second: float
    third: float
    mh1: float
    mh2: float
    mh3: float
    lower_second: float
    lower_third: float

    @property
    def partition_error(self) -> float:
        parts = self.first + self.second + self.third
        return abs(parts - self.total) / max(abs(self.total), np.finfo(float).tiny)

    @property
    def second_ratio(self) -> float:
        den = self.lower_second + self.mh2
        return self.second / den if den > 0 else 0.0

    @property
    def third_ratio(self) -> float:
        den = self.lower_third + self.mh3
        return self.third / den if den > 0 else 0.0


def domination_constants(indices: MultiplierIndices) -> tuple[float, float]:
    """Closed-form constants for the second and third pieces.

    Pointwise ``x^2 <= 1 + |x|^{2p}`` for ``p >= 1`` gives
    ``xi_1^2 + xi_2^2 <= 2 + |xi_1|^{2 gamma} + |xi_2|^{2 gamma}`` and
    ``xi_3^2 <= 1 + |xi_3|^{2 alpha}``.
    """
    if indices.gamma < 1 or indices.alpha < 1:
        raise ValueError("closed-form domination constants need alpha, gamma >= 1")
    return 2.0, 1.0


def domination_split(
    u: np.ndarray, lattice: WavenumberLattice, indices: MultiplierIndices, s: float
) -> DominationSplit:
    radial = _radial_weight(lattice, s)
    xi1, xi2, xi3 = lattice.xi
    horiz = xi1**2 + xi2**2
    vert = xi3**2
    total = norm_sq(u, lattice, lattice.xi_sq * radial)
    first = norm_sq(u[:2], lattice, horiz * radial)
    second = norm_sq(u[2], lattice, horiz * radial)
    third = norm_sq(u, lattice, vert * radial)
    mh1, mh2, mh3 = mhat_terms(u, lattice, indices, s)
    return DominationSplit(
        total=total,
        first=first,
        second=second,
        third=third,
        mh1=mh1,
        mh2=mh2,
        mh3=mh3,
        lower_second=norm_sq(u[2], lattice, radial),
        lower_third=norm_sq(u, lattice, radial),
    )


def energy_report(
    u: np.ndarray,
    t: float,
    lattice: WavenumberLattice,
    indices: MultiplierIndices,
    s: float,
) -> EnergyReport:
    """All functionals at one time; ``balance_residual`` is filled in by the caller."""
    m1, m2, m3 = m_terms(u, lattice, indices)
    mt1, mt2, mt3 = mtilde_terms(u, lattice, indices)
    mh1, mh2, mh3 = mhat_terms(u, lattice, indices, s)
    return EnergyReport(
        t=float(t),
        l2_sq=norm_sq(u, lattice),
        m1=m1,
        m2=m2,
        m3=m3,
        grad_sq=grad_sq(u, lattice),
        mt1=mt1,
        mt2=mt2,
        mt3=mt3,
        e_s=e_s(u, lattice, s),
        mh1=mh1,
        mh2=mh2,
        mh3=mh3,
        vortex_stretch=vortex_stretching(u, lattice),
        theorem_regime=indices.theorem_regime,
    )


def _trapezoid(y: np.ndarray, t: np.ndarray) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)))


def _relative(num: float, den: float) -> float:
    if den == 0:
        return abs(num)
    return abs(num) / abs(den)


def balance_residual(window: Sequence[EnergyReport]) -> float:
    """Relative defect of the L2 balance ``d/dt ||u||^2 / 2 = -m`` over a window.

    ``|Delta(||u||^2/2) + int m dt| / int m dt`` with trapezoid quadrature.
    A window with no dissipation returns the absolute defect (0 for u = 0).
    """
    if len(window) < 3:
        raise ValueError("balance_residual needs at least 3 consecutive reports")
    t = np.array([r.t for r in window])
    e = np.array([r.l2_sq for r in window])
    m = np.array([r.m for r in window])
    dissipated = _trapezoid(m, t)
    return _relative(0.5 * (e[-1] - e[0]) + dissipated, dissipated)


def h1_balance_residual(window: Sequence[EnergyReport]) -> float:
    """Relative defect of ``d/dt ||grad u||^2 / 2 + mt = vortex_stretch``."""
    if len(window) < 3:
        raise ValueError("h1_balance_residual needs at least 3 consecutive reports")
    t = np.array([r.t for r in window])
    g = np.array([r.grad_sq for r in window])
    mt = np.array([r.mt for r in window])
    vs = np.array([r.vortex_stretch for r in window])
    return _relative(
        0.5 * (g[-1] - g[0]) + _trapezoid(mt - vs, t), _trapezoid(mt, t)
    )
