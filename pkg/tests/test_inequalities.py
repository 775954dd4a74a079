import math

import numpy as np
import pytest

from anisons.inequalities import (
    COROLLARY_SYMBOL_CONSTANTS,
    CorpusSpec,
    TestFunction3D,
    brezis_split,
    check_aniso_l4,
    check_brezis_log,
    check_corollary_log,
    check_ladyzhenskaya,
    corollary_symbol_bounds,
    corpus_verdicts,
    estimate_constant,
    gaussian_1d,
    gaussian_3d,
    gaussian_wrap_mass,
    harmonic_1d,
    iter_corpus,
    ladyzhenskaya_gaussian_ratio,
    mixed_norm_hv,
    mixed_norm_vh,
    random_band_1d,
    random_band_3d,
    sobolev_norm,
    stability_study,
    sup_norm_1d,
)
from anisons.lattice import GridSpec


def gaussian_moments(sigma):
    """1D integrals of exp(-x^2/(2 s^2)) powers, by brute-force quadrature."""
    x = np.linspace(-40 * sigma, 40 * sigma, 400001)
    h = x[1] - x[0]
    g = np.exp(-(x**2) / (2 * sigma**2))
    dg = -x / sigma**2 * g
    return np.sum(g**2) * h, np.sum(g**4) * h, np.sum(dg**2) * h


def test_ladyzhenskaya_closed_form_against_quadrature():
    sigma = 0.7
    i2, i4, d2 = gaussian_moments(sigma)
    l4_sq = math.sqrt(i4**3)
    l2 = math.sqrt(i2**3)
    grad = math.sqrt(3 * d2 * i2**2)
    assert ladyzhenskaya_gaussian_ratio() == pytest.approx(l4_sq / (math.sqrt(l2) * grad**1.5), rel=1e-10)


def test_ladyzhenskaya_gaussian_on_torus():
    grid = GridSpec.cube(64)
    v = check_ladyzhenskaya(gaussian_3d(grid.box_length / 10, grid))
    assert abs(v.ratio - ladyzhenskaya_gaussian_ratio()) <= 1e-6


def test_gaussian_width_limits():
    with pytest.raises(ValueError):
        gaussian_3d(1.0, GridSpec.cube(16))
    with pytest.raises(ValueError):
        gaussian_1d(1.0, length=10.0)
    assert gaussian_wrap_mass(1.0, 40.0) < 1e-12
    # L = 10 sigma is not enough for a 1e-12 tail
    assert gaussian_wrap_mass(1.0, 10.0) > 1e-7


def test_mixed_norms_on_separable_function():
    grid = GridSpec(16, 16, 8)
    x1, x2, x3 = grid.coordinates()
    g = 2 + np.cos(x1) * np.sin(2 * x2)
    h = 1 + 0.5 * np.cos(x3)
    f = g * h
    L = grid.box_length
    g4 = (np.sum(np.broadcast_to(g, (16, 16, 1)) ** 4) * (L / 16) ** 2) ** 0.25
    h2 = (np.sum(h**2) * L / 8) ** 0.5
    assert mixed_norm_hv(f, grid, 4, 2) == pytest.approx(g4 * h2, rel=1e-12)
    assert mixed_norm_vh(f, grid, 2, 4) == pytest.approx(g4 * h2, rel=1e-12)


def test_aniso_left_branch_on_corpus():
    spec = CorpusSpec("random_band_3d", 30, 5, 16, (("k_max", 6), ("drop_horizontal_mean", True)))
    for _, v in corpus_verdicts("aniso_l4_left", spec):
        assert v.ratio <= 1 + 1e-10


def test_aniso_right_branch_infinite_without_horizontal_variation():
    grid = GridSpec.cube(8)
    x3 = grid.coordinates()[2]
    u = TestFunction3D(np.broadcast_to(np.cos(x3), grid.shape).copy(), grid, "vertical", {})
    _, right = check_aniso_l4(u)
    assert right.ratio == math.inf


def test_sup_norm_includes_nyquist_mode():
    n = 16
    x = np.arange(n) * 2 * np.pi / n
    f = np.cos(8 * x) + 0.3
    F = np.fft.rfft(f) / n
    assert sup_norm_1d(F, n) == pytest.approx(1.3, rel=1e-12)


def test_brezis_on_harmonic():
    phi = harmonic_1d(3, n=64)
    assert sobolev_norm(phi, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert sobolev_norm(phi, 1.0) == pytest.approx(math.sqrt(10 * math.pi), rel=1e-13)
    v = check_brezis_log(phi, 9.0)
    expect = math.sqrt(math.log(10)) * math.sqrt(math.sqrt(10) * math.pi) + math.sqrt(10 * math.pi) / math.sqrt(10)
    assert v.lhs == pytest.approx(1.0, rel=1e-12)
    assert v.rhs == pytest.approx(expect, rel=1e-13)
    with pytest.raises(ValueError):
        check_brezis_log(phi, 0.0)


def test_brezis_split_partition_and_sup_bound():
    for seed in range(10):
        phi = random_band_1d(seed, 0, 20, n=128)
        for N in (0.5, 3.0, 12.0, 100.0):
            s = brezis_split(phi, N)
            assert s.partition_error <= 1e-12
            assert s.sup <= s.total * (1 + 1e-12)


def test_corollary_bounds():
    xi = np.linspace(0, 500, 200001)
    for alpha in (1.5, 2.0, 3.0):
        r1, r2 = corollary_symbol_bounds(xi, alpha)
        assert r1 <= COROLLARY_SYMBOL_CONSTANTS[0]
        assert r2 <= COROLLARY_SYMBOL_CONSTANTS[1]
    with pytest.raises(ValueError):
        corollary_symbol_bounds(xi, 1.4)
    with pytest.raises(ValueError):
        check_corollary_log(harmonic_1d(1), 1.0, 1.0)
    v = check_corollary_log(harmonic_1d(2, n=64), 4.0, 1.5)
    assert v.lhs == pytest.approx(2.0, rel=1e-12)


def test_corpus_is_prefix_stable_and_rejects_empty():
    with pytest.raises(ValueError):
        CorpusSpec("random_band_3d", 0, 1)
    small = [s.samples for _, s in iter_corpus(CorpusSpec("random_band_3d", 3, 7, 16))]
    big = [s.samples for _, s in iter_corpus(CorpusSpec("random_band_3d", 5, 7, 16))]
    for a, b in zip(small, big):
        assert np.array_equal(a, b)


def test_random_band_is_grid_independent():
    a = random_band_3d([1, 2], GridSpec.cube(16), k_max=5).samples
    b = random_band_3d([1, 2], GridSpec.cube(32), k_max=5).samples
    assert np.allclose(a, b[::2, ::2, ::2], atol=1e-13)


def test_estimate_constant_descriptor():
    spec = CorpusSpec("gaussian_1d", 12, 3, 256)
    sup, desc = estimate_constant("brezis_log", spec)
    assert 0 < sup < 1
    assert desc["tag"] == "gaussian" and "sigma" in desc["params"]
    with pytest.raises(ValueError):
        estimate_constant("nope", spec)


def test_stability_study_small_corpus():
    spec = CorpusSpec("random_divfree", 20, 1, 16, (("k_max", 5),))
    st = stability_study("domination_third", spec, 2)
    assert st.stable(0.05)
    assert math.isfinite(st.base)
