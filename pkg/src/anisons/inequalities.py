"""Numerical checks of the embedding inequalities used by the energy method.

Every check returns an :class:`InequalityVerdict` holding the two sides and
their ratio. For inequalities that hold with constant one the ratio must stay
at or below one; for the ``<~`` inequalities the ratio is a lower bound on
the unknown constant, and :func:`estimate_constant` takes its supremum over a
seeded corpus of test functions.

1D functions are periodized on a long interval and use Fourier-series
coefficients ``F_k = rfft(phi) / n`` with ``||phi||^2 = L sum |F_k|^2``.
The Sobolev norm weight is ``(1 + |xi|^2)^s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

import numpy as np

from .diagnostics import domination_split
from .fields import embed_cube, random_cube
from .lattice import GridSpec, WavenumberLattice, build_lattice
from .spectral import (
    fractional_power,
    from_spectral,
    leray_project,
    norm_sq,
    symmetrize,
    to_spectral,
)
from .symbol import MultiplierIndices

# Default long-interval length for 1D Gaussians, in units of sigma.
GAUSSIAN_LENGTH_FACTOR = 40.0
WRAP_MASS_LIMIT = 1e-12


# ----------------------------------------------------------------------------
# test functions


@dataclass(frozen=True, eq=False)
class TestFunction1D:
    """Real samples of a periodic function on ``[0, length)``."""

    __test__ = False

    samples: np.ndarray
    length: float
    tag: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    def coefficients(self) -> np.ndarray:
        return np.fft.rfft(self.samples) / self.n

    def frequencies(self) -> np.ndarray:
        return 2 * np.pi / self.length * np.arange(self.n // 2 + 1)

    def multiplicity(self) -> np.ndarray:
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = 1.0
        if self.n % 2 == 0:
            w[-1] = 1.0
        return w

    def grid(self) -> np.ndarray:
        return np.arange(self.n) * (self.length / self.n)


@dataclass(frozen=True, eq=False)
class TestFunction3D:
    """Real samples on a 3D grid together with their generator tag."""

    __test__ = False

    samples: np.ndarray
    grid: GridSpec
    tag: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)


def gaussian_wrap_mass(sigma: float, length: float) -> float:
    """Fraction of a 1D Gaussian's mass farther than ``length / 2`` from its center."""
    return math.erfc(length / (2 * math.sqrt(2) * sigma))


def gaussian_1d(
    sigma: float,
    n: int = 512,
    length: float | None = None,
    center: float | None = None,
    amplitude: float = 1.0,
) -> TestFunction1D:
    """Periodized Gaussian ``A exp(-(x - c)^2 / (2 sigma^2))``; default length 40 sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    L = GAUSSIAN_LENGTH_FACTOR * sigma if length is None else float(length)
    wrap = gaussian_wrap_mass(sigma, L)
    if wrap >= WRAP_MASS_LIMIT:
        raise ValueError(
            f"sigma={sigma} too wide for length {L}: wrap-around mass {wrap:.2e}"
        )
    c = 0.5 * L if center is None else float(center)
    x = np.arange(n) * (L / n)
    samples = sum(
        np.exp(-((x - c - m * L) ** 2) / (2 * sigma**2)) for m in (-2, -1, 0, 1, 2)
    )
    return TestFunction1D(
        amplitude * samples,
        L,
        "gaussian",
        {"sigma": sigma, "center": c, "amplitude": amplitude},
    )


def harmonic_1d(
    k: int, n: int = 64, length: float = 2 * math.pi, amplitude: float = 1.0, phase: float = 0.0
) -> TestFunction1D:
    """``A cos(2 pi k x / L + phase)``."""
    x = np.arange(n) * (length / n)
    samples = amplitude * np.cos(2 * np.pi * k * x / length + phase)
    return TestFunction1D(samples, length, "harmonic", {"k": k, "amplitude": amplitude, "phase": phase})


def random_band_1d(
    seed, k_min: int, k_max: int, n: int = 128, length: float = 2 * math.pi
) -> TestFunction1D:
    """Random trigonometric polynomial with modes ``k_min <= |k| <= k_max``."""
    if not 0 <= k_min <= k_max < n // 2:
        raise ValueError("need 0 <= k_min <= k_max < n/2")
    rng = np.random.default_rng(seed)
    k = np.arange(k_min, k_max + 1)
    c = rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)
    F = np.zeros(n // 2 + 1, dtype=complex)
    F[k] = c
    F[0] = F[0].real
    return TestFunction1D(
        np.fft.irfft(F * n, n), length, "random_band", {"seed": seed, "k_min": k_min, "k_max": k_max}
    )


def gaussian_3d(
    sigma: float, grid: GridSpec, center: tuple[float, float, float] | None = None, amplitude: float = 1.0
) -> TestFunction3D:
    """Periodized isotropic Gaussian on the grid (needs ``sigma <= L / 10``)."""
    L = grid.box_length
    if sigma > L / 10:
        raise ValueError(f"sigma={sigma} exceeds L/10={L / 10}")
    c = (0.5 * L,) * 3 if center is None else center
    coords = grid.coordinates()
    factors = []
    for x, ci in zip(coords, c):
        factors.append(
            sum(np.exp(-((x - ci - m * L) ** 2) / (2 * sigma**2)) for m in (-2, -1, 0, 1, 2))
        )
    samples = amplitude * factors[0] * factors[1] * factors[2]
    return TestFunction3D(samples, grid, "gaussian", {"sigma": sigma, "amplitude": amplitude})


def random_band_3d(
    seed,
    grid: GridSpec,
    k_min: float = 1.0,
    k_max: int = 4,
    drop_horizontal_mean: bool = False,
) -> TestFunction3D:
    """Random real trigonometric polynomial with integer radius in ``[k_min, k_max]``.

    The coefficients depend only on the seed and the band, not on the grid.
    """
    rng = np.random.default_rng(seed)
    cube = random_cube(rng, k_max, kmin=k_min, drop_horizontal_mean=drop_horizontal_mean)
    lattice = build_lattice(grid)
    samples = from_spectral(embed_cube(cube, lattice)[0], lattice)
    return TestFunction3D(
        samples,
        grid,
        "random_band",
        {"seed": _seed_repr(seed), "k_min": k_min, "k_max": k_max},
    )


def random_divfree_band(seed, grid: GridSpec, k_min: float = 1.0, k_max: int = 4) -> np.ndarray:
    """Spectral divergence-free velocity with grid-independent band-limited content."""
    rng = np.random.default_rng(seed)
    lattice = build_lattice(grid)
    cube = random_cube(rng, k_max, kmin=k_min, components=3)
    return leray_project(symmetrize(embed_cube(cube, lattice), lattice), lattice)


def _seed_repr(seed):
    if isinstance(seed, (list, tuple)):
        return [int(s) for s in seed]
    return seed


# ----------------------------------------------------------------------------
# norms


def _norm_sq_1d(phi: TestFunction1D, weight: np.ndarray | None = None) -> float:
    F = phi.coefficients()
    dens = np.abs(F) ** 2 * phi.multiplicity()
    if weight is not None:
        dens = dens * weight
    return float(phi.length * np.sum(dens))


def sobolev_norm(phi: TestFunction1D, s: float) -> float:
    """``(sum (1 + |xi|^2)^s |F|^2 L)^{1/2}``; ``s = 0`` is the L2 norm."""
    if s < 0:
        raise ValueError("Sobolev order must be >= 0")
    xi = phi.frequencies()
    return math.sqrt(_norm_sq_1d(phi, (1.0 + xi**2) ** s))


def multiplier_norm_1d(phi: TestFunction1D, exponent: float) -> float:
    """``|| M^exponent phi ||_{L2}`` with ``M^t`` the symbol ``|xi|^t``."""
    xi = phi.frequencies()
    return math.sqrt(_norm_sq_1d(phi, fractional_power(xi, 2 * exponent)))


def _pad_1d(F: np.ndarray, n: int, factor: int) -> np.ndarray:
    m = n * factor
    out = np.zeros(m // 2 + 1, dtype=complex)
    out[: n // 2] = F[: n // 2]
    if n % 2 == 0:
        # the coarse Nyquist mode is the real cosine, split between +-n/2
        out[n // 2] = 0.5 * F[n // 2].real
    return out


def sup_norm_1d(F: np.ndarray, n: int, factor: int = 4) -> float:
    """Max of ``|f|`` on a ``factor``-times oversampled grid."""
    m = n * factor
    return float(np.max(np.abs(np.fft.irfft(_pad_1d(F, n, factor) * m, m))))


def resample_3d(F: np.ndarray, lattice: WavenumberLattice, factor: int) -> np.ndarray:
    """Physical samples of ``F`` on a grid ``factor`` times finer per axis.

    Nyquist modes of the coarse grid are dropped; band-limited fields carry none.
    """
    if factor == 1:
        return from_spectral(F, lattice)
    g = lattice.grid
    fine = GridSpec(g.n1 * factor, g.n2 * factor, g.n3 * factor, g.box_length)
    out = np.zeros(fine.spectral_shape, dtype=complex)
    k1 = lattice.modes[0]
    k2 = lattice.modes[1]
    keep1 = np.abs(k1) < g.n1 // 2
    keep2 = np.abs(k2) < g.n2 // 2
    i1 = (k1[keep1] % fine.n1)
    i2 = (k2[keep2] % fine.n2)
    n3h = g.n3 // 2
    sub = F[np.ix_(keep1, keep2, np.arange(n3h))]
    out[np.ix_(i1, i2, np.arange(n3h))] = sub
    fine_lat = build_lattice(fine)
    return from_spectral(out, fine_lat)


def mixed_norm_hv(samples: np.ndarray, grid: GridSpec, p_h: float, p_v: float) -> float:
    """``|| ||f||_{L^p_v} ||_{L^p_h}``: inner over x3, outer over (x1, x2)."""
    h = grid.box_length / np.array(samples.shape)
    inner = (np.sum(np.abs(samples) ** p_v, axis=2) * h[2]) ** (1.0 / p_v)
    return float((np.sum(inner**p_h) * h[0] * h[1]) ** (1.0 / p_h))


def mixed_norm_vh(samples: np.ndarray, grid: GridSpec, p_v: float, p_h: float) -> float:
    """``|| ||f||_{L^p_h} ||_{L^p_v}``: inner over (x1, x2), outer over x3."""
    h = grid.box_length / np.array(samples.shape)
    inner = (np.sum(np.abs(samples) ** p_h, axis=(0, 1)) * h[0] * h[1]) ** (1.0 / p_h)
    return float((np.sum(inner**p_v) * h[2]) ** (1.0 / p_v))


def lp_norm(samples: np.ndarray, grid: GridSpec, p: float) -> float:
    cell = (grid.box_length**3) / samples.size
    return float((np.sum(np.abs(samples) ** p) * cell) ** (1.0 / p))


# ----------------------------------------------------------------------------
# verdicts


@dataclass
class InequalityVerdict:
    check: str
    lhs: float
    rhs: float
    ratio: float
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
        }


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0:
        return 0.0
    if rhs == 0:
        return math.inf
    return lhs / rhs


def _verdict(check: str, lhs: float, rhs: float, **params) -> InequalityVerdict:
    return InequalityVerdict(check, float(lhs), float(rhs), _ratio(lhs, rhs), params)


def _as_3d(u) -> tuple[np.ndarray, GridSpec]:
    if isinstance(u, TestFunction3D):
        return np.asarray(u.samples, dtype=float), u.grid
    raise TypeError("expected a TestFunction3D")


def check_aniso_l4(u: TestFunction3D, oversample: int = 2) -> tuple[InequalityVerdict, InequalityVerdict]:
    """Anisotropic L4 chain: Minkowski order swap, then the interpolation bound.

    Left: ``||u||_{L^4_h L^2_v} <= ||u||_{L^2_v L^4_h}`` (constant one).
    Right: ``||u||_{L^2_v L^4_h}`` against ``||u||^{1/2} ||grad_h u||^{1/2}``.
    Mixed norms are evaluated on an oversampled grid.
    """
    samples, grid = _as_3d(u)
    lattice = build_lattice(grid)
    F = to_spectral(samples, lattice)
    fine = resample_3d(F, lattice, oversample)
    fine_grid = GridSpec(*(n * oversample for n in grid.shape), box_length=grid.box_length)
    hv = mixed_norm_hv(fine, fine_grid, 4, 2)
    vh = mixed_norm_vh(fine, fine_grid, 2, 4)
    l2 = math.sqrt(norm_sq(F, lattice))
    grad_h = math.sqrt(norm_sq(F, lattice, lattice.xi[0] ** 2 + lattice.xi[1] ** 2))
    left = _verdict("aniso_l4_left", hv, vh, n=grid.n1)
    right = _verdict("aniso_l4_right", vh, math.sqrt(l2 * grad_h), n=grid.n1)
    return left, right


def _as_1d(phi) -> TestFunction1D:
    if not isinstance(phi, TestFunction1D):
        raise TypeError("expected a TestFunction1D")
    return phi


def check_brezis_log(phi: TestFunction1D, N: float, oversample: int = 4) -> InequalityVerdict:
    """Logarithmic sup-norm bound with frequency-split parameter ``N``.

    ``rhs = sqrt(ln(1+N)) ||phi||_{H^1/2} + ||phi||_{H^1} / sqrt(1+N)``.
    """
    phi = _as_1d(phi)
    if not N > 0:
        raise ValueError(f"N must be positive, got {N}")
    lhs = sup_norm_1d(phi.coefficients(), phi.n, oversample)
    rhs = math.sqrt(math.log1p(N)) * sobolev_norm(phi, 0.5) + sobolev_norm(phi, 1.0) / math.sqrt(1 + N)
    return _verdict("brezis_log", lhs, rhs, N=N, n=phi.n)


def check_corollary_log(
    phi: TestFunction1D, N: float, alpha: float, oversample: int = 4
) -> InequalityVerdict:
    """Sup norm of ``phi'`` against the fractional-multiplier form of the log bound."""
    phi = _as_1d(phi)
    if alpha < 1.5:
        raise ValueError(f"alpha must be >= 3/2, got {alpha}")
    if not N > 0:
        raise ValueError(f"N must be positive, got {N}")
    F = phi.coefficients()
    xi = phi.frequencies()
    dF = 1j * xi * F
    if phi.n % 2 == 0:
        dF[-1] = 0.0
    lhs = sup_norm_1d(dF, phi.n, oversample)
    l2 = math.sqrt(_norm_sq_1d(phi))
    low = l2 + multiplier_norm_1d(phi, alpha)
    high = l2 + multiplier_norm_1d(phi, alpha + 1)
    rhs = math.sqrt(math.log1p(N)) * low + high / math.sqrt(1 + N)
    return _verdict("corollary_log", lhs, rhs, N=N, alpha=alpha, n=phi.n)


def check_ladyzhenskaya(phi: TestFunction3D, oversample: int = 2) -> InequalityVerdict:
    """``||phi||_{L4}^2`` against ``||phi||^{1/2} ||grad phi||^{3/2}``."""
    samples, grid = _as_3d(phi)
    lattice = build_lattice(grid)
    F = to_spectral(samples, lattice)
    fine = resample_3d(F, lattice, oversample)
    l4 = lp_norm(fine, GridSpec(*(n * oversample for n in grid.shape), box_length=grid.box_length), 4)
    l2 = math.sqrt(norm_sq(F, lattice))
    gr = math.sqrt(norm_sq(F, lattice, lattice.xi_sq))
    return _verdict("ladyzhenskaya", l4**2, math.sqrt(l2) * gr**1.5, n=grid.n1)


def ladyzhenskaya_gaussian_ratio() -> float:
    """Whole-space value of the Ladyzhenskaya ratio for any isotropic Gaussian."""
    return (3 * math.pi) ** -0.75


@dataclass
class BrezisSplit:
    low: float
    high: float
    total: float
    sup: float

    @property
    def partition_error(self) -> float:
        return abs(self.low + self.high - self.total) / max(self.total, np.finfo(float).tiny)


def brezis_split(phi: TestFunction1D, N: float, oversample: int = 4) -> BrezisSplit:
    """Two-piece frequency split of ``sum_k |F_k|`` at ``|xi| = N``.

    Each piece is written as the product that the Cauchy-Schwarz step pairs
    up: ``(|F| (1+|xi|)^{1/2}) (1+|xi|)^{-1/2}`` on ``|xi| <= N`` and
    ``(|F| (1+|xi|)) (1+|xi|)^{-1}`` on ``|xi| > N``. ``sup`` is the
    oversampled max of ``|phi|``, which ``total`` bounds.
    """
    phi = _as_1d(phi)
    F = np.abs(phi.coefficients())
    w = phi.multiplicity()
    xi = phi.frequencies()
    one = 1.0 + xi
    lo = xi <= N
    low = float(np.sum(w[lo] * (F[lo] * np.sqrt(one[lo])) * one[lo] ** -0.5))
    high = float(np.sum(w[~lo] * (F[~lo] * one[~lo]) / one[~lo]))
    total = float(np.sum(w * F))
    return BrezisSplit(low, high, total, sup_norm_1d(phi.coefficients(), phi.n, oversample))


def corollary_symbol_bounds(xi: np.ndarray, alpha: float) -> tuple[float, float]:
    """Largest ratios of the two symbol bounds behind the derivative corollary.

    Returns ``max |xi|(1+|xi|)^{1/2} / (1+|xi|^alpha)`` and
    ``max |xi|(1+|xi|) / (1+|xi|^{alpha+1})``; both are at most
    :data:`COROLLARY_SYMBOL_CONSTANTS` for ``alpha >= 3/2``.
    """
    if alpha < 1.5:
        raise ValueError("alpha must be >= 3/2")
    a = np.abs(np.asarray(xi, dtype=float))
    r1 = a * np.sqrt(1 + a) / (1 + a**alpha)
    r2 = a * (1 + a) / (1 + a ** (alpha + 1))
    return float(np.max(r1)), float(np.max(r2))


# |xi| <= 1: both sides bounded directly; |xi| >= 1: 1 + |xi| <= 2 |xi|.
COROLLARY_SYMBOL_CONSTANTS = (math.sqrt(2.0), 2.0)


# ----------------------------------------------------------------------------
# corpora and constant estimation


CORPUS_KINDS = ("random_band_3d", "random_divfree", "gaussian_1d", "harmonic_1d", "harmonic_3d")


@dataclass(frozen=True)
class CorpusSpec:
    """Seeded family of test functions.

    Sample ``i`` is drawn from ``default_rng([seed, i])``, so a larger corpus
    with the same seed contains every sample of a smaller one.
    """

    kind: str
    size: int
    seed: int
    n: int = 16
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.kind not in CORPUS_KINDS:
            raise ValueError(f"unknown corpus kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("corpus must be nonempty")

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    def refined(self, factor: int = 2) -> "CorpusSpec":
        return CorpusSpec(self.kind, self.size, self.seed, self.n * factor, self.params)

    def reseeded(self, seed: int) -> "CorpusSpec":
        return CorpusSpec(self.kind, self.size, seed, self.n, self.params)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "size": self.size, "seed": self.seed, "n": self.n, "params": dict(self.params)}


def iter_corpus(spec: CorpusSpec) -> Iterator[tuple[int, Any]]:
    """Yield ``(index, sample)``; samples are TestFunction1D/3D or spectral velocities."""
    if spec.kind == "harmonic_1d":
        for i in range(spec.size):
            k = int(spec.param("k", 1)) + i
            yield i, harmonic_1d(k, n=spec.n, length=spec.param("length", 2 * math.pi))
        return
    if spec.kind == "harmonic_3d":
        grid = GridSpec.cube(spec.n)
        x1, x2, x3 = grid.coordinates()
        for i in range(spec.size):
            k = int(spec.param("k", 1)) + i
            samples = np.broadcast_to(np.sin(k * x1) * np.cos(k * x2) * np.cos(k * x3), grid.shape)
            yield i, TestFunction3D(np.array(samples), grid, "harmonic", {"k": k})
        return
    for i in range(spec.size):
        sample_seed = [spec.seed, i]
        if spec.kind == "random_band_3d":
            yield i, random_band_3d(
                sample_seed,
                GridSpec.cube(spec.n),
                k_min=spec.param("k_min", 1.0),
                k_max=int(spec.param("k_max", 4)),
                drop_horizontal_mean=bool(spec.param("drop_horizontal_mean", False)),
            )
        elif spec.kind == "random_divfree":
            yield i, random_divfree_band(
                sample_seed,
                GridSpec.cube(spec.n),
                k_min=spec.param("k_min", 1.0),
                k_max=int(spec.param("k_max", 4)),
            )
        else:
            rng = np.random.default_rng(sample_seed)
            lo, hi = spec.param("sigma_range", (0.05, 1.0))
            sigma = float(np.exp(rng.uniform(math.log(lo), math.log(hi))))
            length = GAUSSIAN_LENGTH_FACTOR * sigma
            center = float(rng.uniform(0.0, length))
            yield i, gaussian_1d(sigma, n=spec.n, length=length, center=center)


def _gradient_energy_1d(phi: TestFunction1D) -> float:
    return _norm_sq_1d(phi, phi.frequencies() ** 2)


def _evaluate(op_tag: str, sample, options: Mapping[str, Any]) -> InequalityVerdict:
    if op_tag == "aniso_l4_left":
        return check_aniso_l4(sample)[0]
    if op_tag == "aniso_l4_right":
        return check_aniso_l4(sample)[1]
    if op_tag == "ladyzhenskaya":
        return check_ladyzhenskaya(sample)
    if op_tag in ("brezis_log", "corollary_log"):
        N = options.get("N")
        if N is None:
            N = max(_gradient_energy_1d(sample), np.finfo(float).tiny)
        if op_tag == "brezis_log":
            return check_brezis_log(sample, N)
        return check_corollary_log(sample, N, options.get("alpha", 1.5))
    if op_tag in ("domination_second", "domination_third"):
        grid = GridSpec.cube(sample.shape[1])
        lattice = build_lattice(grid)
        indices = options.get("indices", MultiplierIndices(1.5, 1.0, 1.25))
        split = domination_split(sample, lattice, indices, options.get("s", 2.0))
        if op_tag == "domination_second":
            return _verdict(op_tag, split.second, split.lower_second + split.mh2, n=grid.n1)
        return _verdict(op_tag, split.third, split.lower_third + split.mh3, n=grid.n1)
    raise ValueError(f"unknown check {op_tag!r}")


OP_TAGS = (
    "aniso_l4_left",
    "aniso_l4_right",
    "ladyzhenskaya",
    "brezis_log",
    "corollary_log",
    "domination_second",
    "domination_third",
)


def corpus_verdicts(op_tag: str, spec: CorpusSpec, **options) -> list[tuple[dict, InequalityVerdict]]:
    """Evaluate ``op_tag`` on every corpus sample."""
    if op_tag not in OP_TAGS:
        raise ValueError(f"unknown check {op_tag!r}")
    out = []
    for i, sample in iter_corpus(spec):
        tag = getattr(sample, "tag", spec.kind)
        params = dict(getattr(sample, "params", {}) or {})
        out.append(({"index": i, "tag": tag, "params": params}, _evaluate(op_tag, sample, options)))
    return out


def estimate_constant(op_tag: str, spec: CorpusSpec, **options) -> tuple[float, dict]:
    """Supremum of the ratio over the corpus and a descriptor of the maximizer."""
    best_ratio = -math.inf
    best: dict = {}
    for desc, verdict in corpus_verdicts(op_tag, spec, **options):
        if verdict.ratio > best_ratio:
            best_ratio, best = verdict.ratio, desc
    return float(best_ratio), best


def relative_change(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny)


@dataclass
class StabilityStudy:
    op_tag: str
    base: float
    refined: float
    reseeded: float

    @property
    def refinement_change(self) -> float:
        return relative_change(self.base, self.refined)

    @property
    def reseed_change(self) -> float:
        return relative_change(self.base, self.reseeded)

    def stable(self, tolerance: float = 0.05) -> bool:
        finite = all(math.isfinite(v) for v in (self.base, self.refined, self.reseeded))
        return finite and self.refinement_change < tolerance and self.reseed_change < tolerance


def stability_study(op_tag: str, spec: CorpusSpec, reseed: int, **options) -> StabilityStudy:
    """Corpus sup at the base grid, a 2x refined grid, and with a fresh seed."""
    base, _ = estimate_constant(op_tag, spec, **options)
    refined, _ = estimate_constant(op_tag, spec.refined(2), **options)
    reseeded, _ = estimate_constant(op_tag, spec.reseeded(reseed), **options)
    return StabilityStudy(op_tag, base, refined, reseeded)
