"""Verification suites behind ``anisons verify``.

``identities`` checks exact discrete identities (Parseval, multipliers,
projection, skew-symmetry, the stretching rewritings, frequency partitions).
``lemmas`` checks the embedding inequalities: constant-one inequalities per
sample, and corpus suprema of the ``<~`` ratios for finiteness and for
stability under 2x grid refinement and reseeding.

Each record is ``{check, params, lhs, rhs, ratio, pass}``. For tolerance
checks ``lhs`` is the worst observed error and ``rhs`` the tolerance.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .diagnostics import advective_h1_form, domination_constants, domination_split, kukavica_split, vortex_stretching
from .inequalities import (
    COROLLARY_SYMBOL_CONSTANTS,
    CorpusSpec,
    brezis_split,
    check_brezis_log,
    check_ladyzhenskaya,
    corollary_symbol_bounds,
    corpus_verdicts,
    gaussian_1d,
    gaussian_3d,
    iter_corpus,
    ladyzhenskaya_gaussian_ratio,
    random_divfree_band,
    stability_study,
)
from .lattice import GridSpec, build_lattice
from .nonlinear import nonlinear_term
from .spectral import (
    apply_multiplier,
    divergence_error,
    inner,
    l2_norm,
    leray_project,
    physical_l2_sq,
    norm_sq,
    to_spectral,
)
from .symbol import MultiplierIndices

SUITES = ("lemmas", "identities", "all")
THEOREM_INDICES = MultiplierIndices(1.5, 1.0, 1.25)
STABILITY_TOLERANCE = 0.05


def _record(check: str, lhs: float, rhs: float, passed: bool, **params) -> dict:
    lhs, rhs = float(lhs), float(rhs)
    ratio = 0.0 if lhs == 0 else (lhs / rhs if rhs != 0 else math.inf)
    return {"check": check, "params": params, "lhs": lhs, "rhs": rhs, "ratio": ratio, "pass": bool(passed)}


def _tolerance(check: str, worst: float, tol: float, **params) -> dict:
    return _record(check, worst, tol, worst <= tol, tolerance=tol, **params)


def _random_velocity(rng: np.random.Generator, lattice) -> np.ndarray:
    phys = rng.standard_normal((3,) + lattice.grid.shape)
    return to_spectral(phys, lattice)


# ----------------------------------------------------------------------------
# identities


def identity_checks(seed: int, corpus_size: int) -> list[dict]:
    if corpus_size < 1:
        raise ValueError("corpus must be nonempty")
    rng = np.random.default_rng(seed)
    grid = GridSpec.cube(16)
    lat = build_lattice(grid)
    out = []

    worst = 0.0
    for _ in range(corpus_size):
        f = rng.standard_normal(grid.shape)
        phys = physical_l2_sq(f, lat)
        worst = max(worst, abs(phys - norm_sq(to_spectral(f, lat), lat)) / phys)
    out.append(_tolerance("parseval", worst, 1e-12, n=16, samples=corpus_size))

    worst = 0.0
    x = grid.coordinates()
    for theta in (0.5, 1.0, 1.25, 1.5, 2.0):
        for axis in (1, 2, 3):
            for k in (1, 2, 3, 5):
                F = to_spectral(np.broadcast_to(np.sin(k * x[axis - 1]), grid.shape), lat)
                G = apply_multiplier(F, lat, axis, 2 * theta)
                expect = k ** (2 * theta) * F
                worst = max(worst, float(np.max(np.abs(G - expect)) / np.max(np.abs(expect))))
    out.append(_tolerance("multiplier_exactness", worst, 1e-12, thetas=[0.5, 1.0, 1.25, 1.5, 2.0]))

    idem = adj = div = 0.0
    for _ in range(corpus_size):
        u = _random_velocity(rng, lat)
        v = _random_velocity(rng, lat)
        pu = leray_project(u, lat)
        idem = max(idem, l2_norm(leray_project(pu, lat) - pu, lat) / l2_norm(pu, lat))
        adj = max(adj, abs(inner(pu, v, lat) - inner(u, leray_project(v, lat), lat)) / (l2_norm(u, lat) * l2_norm(v, lat)))
        div = max(div, divergence_error(pu, lat))
    out.append(_tolerance("leray_idempotence", idem, 1e-14, samples=corpus_size))
    out.append(_tolerance("leray_self_adjoint", adj, 1e-12, samples=corpus_size))
    out.append(_tolerance("leray_divergence_free", div, 1e-12, samples=corpus_size))

    skew = kuk = eq9 = part = first = 0.0
    for i in range(corpus_size):
        u = random_divfree_band([seed, i], grid, k_max=5)
        nl = nonlinear_term(u, lat)
        skew = max(skew, abs(inner(nl, u, lat)) / (l2_norm(u, lat) * l2_norm(nl, lat)))
        a, _, a_rhs = kukavica_split(u, lat)
        kuk = max(kuk, abs(a - a_rhs) / (1 + abs(a)))
        adv = advective_h1_form(u, lat)
        eq9 = max(eq9, abs(vortex_stretching(u, lat) - adv) / abs(adv))
        split = domination_split(u, lat, THEOREM_INDICES, 2.0)
        part = max(part, split.partition_error)
        first = max(first, abs(split.first - split.mh1) / split.first)
    out.append(_tolerance("skew_symmetry", skew, 1e-12, n=16, samples=corpus_size))
    out.append(_tolerance("kukavica_identity", kuk, 1e-8, n=16, samples=corpus_size))
    out.append(_tolerance("h1_stretching_consistency", eq9, 1e-8, n=16, samples=corpus_size))
    out.append(_tolerance("domination_partition", part, 1e-12, s=2.0, samples=corpus_size))
    out.append(_tolerance("domination_first_piece", first, 1e-12, s=2.0, samples=corpus_size))

    part = excess = 0.0
    spec = CorpusSpec("gaussian_1d", corpus_size, seed, 512)
    for _, phi in iter_corpus(spec):
        for N in (1.0, 10.0, 100.0, 1e4):
            bs = brezis_split(phi, N)
            part = max(part, bs.partition_error)
            excess = max(excess, bs.sup / bs.total)
    out.append(_tolerance("brezis_partition", part, 1e-12, samples=corpus_size))
    out.append(_record("brezis_sup_bound", excess, 1 + 1e-12, excess <= 1 + 1e-12, samples=corpus_size))
    return out


# ----------------------------------------------------------------------------
# lemmas


def lemma_corpora(seed: int, corpus_size: int) -> dict[str, tuple[CorpusSpec, dict]]:
    """Default corpus and options for every ``<~`` branch."""
    band = (("k_min", 1.0), ("k_max", 6))
    return {
        "aniso_l4_right": (
            CorpusSpec("random_band_3d", corpus_size, seed, 16, band + (("drop_horizontal_mean", True),)),
            {},
        ),
        "ladyzhenskaya": (CorpusSpec("random_band_3d", corpus_size, seed, 16, band), {}),
        "brezis_log": (CorpusSpec("gaussian_1d", corpus_size, seed, 512), {}),
        "corollary_log": (CorpusSpec("gaussian_1d", corpus_size, seed, 512), {"alpha": 1.5}),
        "domination_second": (
            CorpusSpec("random_divfree", corpus_size, seed, 16, (("k_max", 5),)),
            {"indices": THEOREM_INDICES, "s": 2.0},
        ),
        "domination_third": (
            CorpusSpec("random_divfree", corpus_size, seed, 16, (("k_max", 5),)),
            {"indices": THEOREM_INDICES, "s": 2.0},
        ),
    }


def brezis_sweep(phi, Ns=(1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6)) -> list:
    return [check_brezis_log(phi, N) for N in Ns]


def lemma_checks(seed: int, corpus_size: int) -> list[dict]:
    if corpus_size < 1:
        raise ValueError("corpus must be nonempty")
    out = []
    corpora = lemma_corpora(seed, corpus_size)

    left_spec, _ = corpora["aniso_l4_right"]
    worst = max(v.ratio for _, v in corpus_verdicts("aniso_l4_left", left_spec))
    out.append(_record("aniso_l4_left", worst, 1 + 1e-10, worst <= 1 + 1e-10, corpus=left_spec.as_dict()))

    c2, c3 = domination_constants(THEOREM_INDICES)
    bounds = {"domination_second": c2, "domination_third": c3}
    for tag, (spec, options) in corpora.items():
        st = stability_study(tag, spec, seed + 1, **options)
        change = max(st.refinement_change, st.reseed_change)
        params = {
            "corpus": spec.as_dict(),
            "sup": st.base,
            "sup_refined": st.refined,
            "sup_reseeded": st.reseeded,
            "refinement_change": st.refinement_change,
            "reseed_change": st.reseed_change,
        }
        out.append(_record(f"{tag}_stability", change, STABILITY_TOLERANCE, st.stable(STABILITY_TOLERANCE), **params))
        if tag in bounds:
            sup = max(st.base, st.refined, st.reseeded)
            out.append(_record(f"{tag}_closed_form_bound", sup, bounds[tag], sup <= bounds[tag], s=2.0))

    lg = GridSpec.cube(64)
    sigma = lg.box_length / 10
    v = check_ladyzhenskaya(gaussian_3d(sigma, lg))
    exact = ladyzhenskaya_gaussian_ratio()
    err = abs(v.ratio - exact)
    out.append(_record("ladyzhenskaya_gaussian", v.ratio, exact, err <= 1e-6, sigma=sigma, n=64, abs_error=err))

    worst1 = worst2 = 0.0
    xi = np.arange(0, 20001) * 0.01
    for alpha in (1.5, 2.0, 2.5, 3.0):
        r1, r2 = corollary_symbol_bounds(xi, alpha)
        worst1, worst2 = max(worst1, r1), max(worst2, r2)
    C1, C2 = COROLLARY_SYMBOL_CONSTANTS
    out.append(_record("corollary_symbol_bound_low", worst1, C1, worst1 <= C1))
    out.append(_record("corollary_symbol_bound_high", worst2, C2, worst2 <= C2))

    phi = gaussian_1d(0.05, n=1024)
    sweep = brezis_sweep(phi)
    ratios = [v.ratio for v in sweep]
    best = int(np.argmax(ratios))
    out.append(
        _record(
            "brezis_interior_minimizer",
            ratios[best],
            max(ratios[0], ratios[-1]),
            0 < best < len(ratios) - 1 and all(math.isfinite(r) for r in ratios),
            sigma=0.05,
            N_values=[v.params["N"] for v in sweep],
            ratios=ratios,
            best_N=sweep[best].params["N"],
        )
    )
    return out


SUITE_RUNNERS: dict[str, Callable[[int, int], list[dict]]] = {
    "identities": identity_checks,
    "lemmas": lemma_checks,
}


def run_suite(suite: str, seed: int, corpus_size: int = 200) -> list[dict]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    if corpus_size < 1:
        raise ValueError("corpus must be nonempty")
    names = ("identities", "lemmas") if suite == "all" else (suite,)
    records = []
    for name in names:
        for rec in SUITE_RUNNERS[name](seed, corpus_size):
            rec["suite"] = name
            records.append(rec)
    return records
