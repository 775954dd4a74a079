"""Run configuration files.

Grammar: a TOML document made only of the sections below, each holding flat
``key = value`` pairs (no nested tables, no arrays). Every key is optional
unless marked required; unknown sections or keys are rejected by name.

    [grid]
    n = 32                 # shorthand for n1 = n2 = n3
    n1 = 32                # even, >= 4
    n2 = 32
    n3 = 32
    box_length = 6.283185307179586

    [indices]              # required
    alpha = 1.5
    beta = 1.0
    gamma = 1.25

    [time]                 # dt and t_end required
    dt = 1e-3
    t_end = 1.0
    integrator = "etdrk2"  # etd1 | etdrk2 | imex_cn

    [initial_condition]
    kind = "taylor_green"  # shear_x2 | shear_x3 | taylor_green | random_divfree
    amplitude = 1.0
    wavenumber = 1         # shear flows only
    seed = 7               # required for random_divfree
    spectrum_slope = -3.0  # random_divfree only

    [diagnostics]
    every = 1
    sobolev_order_s = 3.0
    blowup_ceiling = 1e12
    checkpoint_every = 0   # 0 writes only the final checkpoint

``theorem_regime`` is derived from the indices and may not be set.
"""

from __future__ import annotations

import math
import sys
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .integrators import INTEGRATORS
from .lattice import GridSpec
from .solver import INITIAL_KINDS, InitialCondition, RunConfig
from .symbol import MultiplierIndices


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


_SCHEMA: dict[str, dict[str, type | tuple[type, ...]]] = {
    "grid": {"n": int, "n1": int, "n2": int, "n3": int, "box_length": (int, float)},
    "indices": {"alpha": (int, float), "beta": (int, float), "gamma": (int, float)},
    "time": {"dt": (int, float), "t_end": (int, float), "integrator": str},
    "initial_condition": {
        "kind": str,
        "amplitude": (int, float),
        "wavenumber": int,
        "seed": int,
        "spectrum_slope": (int, float),
    },
    "diagnostics": {
        "every": int,
        "sobolev_order_s": (int, float),
        "blowup_ceiling": (int, float),
        "checkpoint_every": int,
    },
}


def _get(section: Mapping[str, Any], sec: str, key: str, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"{sec}.{key}", "required key is missing")
        return default
    value = section[key]
    expected = _SCHEMA[sec][key]
    if isinstance(value, bool) or not isinstance(value, expected):
        raise ConfigError(f"{sec}.{key}", f"expected {_type_name(expected)}, got {value!r}")
    return value


def _type_name(t) -> str:
    if isinstance(t, tuple):
        return "number"
    return {int: "integer", str: "string"}.get(t, t.__name__)


def _check_keys(doc: Mapping[str, Any]) -> None:
    for sec, body in doc.items():
        if sec == "theorem_regime":
            raise ConfigError(sec, "is derived from the indices and cannot be set")
        if sec not in _SCHEMA:
            raise ConfigError(sec, "unknown section or top-level key")
        if not isinstance(body, Mapping):
            raise ConfigError(sec, "expected a section of key = value pairs")
        for key in body:
            if key == "theorem_regime":
                raise ConfigError(f"{sec}.{key}", "is derived from the indices and cannot be set")
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"{sec}.{key}", "unknown key")


def _wrap(key: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None


def config_from_mapping(doc: Mapping[str, Any]) -> RunConfig:
    """Validate a sectioned mapping (as produced by TOML parsing)."""
    _check_keys(doc)
    grid_sec = doc.get("grid", {})
    n = _get(grid_sec, "grid", "n", 32)
    n1 = _get(grid_sec, "grid", "n1", n)
    n2 = _get(grid_sec, "grid", "n2", n)
    n3 = _get(grid_sec, "grid", "n3", n)
    box = float(_get(grid_sec, "grid", "box_length", 2 * math.pi))
    for key, val in (("grid.n1", n1), ("grid.n2", n2), ("grid.n3", n3)):
        if val < 4 or val % 2:
            raise ConfigError(key, f"grid size must be even and >= 4, got {val}")
    grid = _wrap("grid", GridSpec, n1, n2, n3, box)

    if "indices" not in doc:
        raise ConfigError("indices", "required section is missing")
    idx = doc["indices"]
    values = {k: float(_get(idx, "indices", k, required=True)) for k in ("alpha", "beta", "gamma")}
    for k, v in values.items():
        if v < 0 or not math.isfinite(v):
            raise ConfigError(f"indices.{k}", f"must be finite and >= 0, got {v}")
    indices = MultiplierIndices(**values)

    if "time" not in doc:
        raise ConfigError("time", "required section is missing")
    tm = doc["time"]
    dt = float(_get(tm, "time", "dt", required=True))
    t_end = float(_get(tm, "time", "t_end", required=True))
    integrator = _get(tm, "time", "integrator", "etdrk2")
    if not (dt > 0 and math.isfinite(dt)):
        raise ConfigError("time.dt", f"must be positive, got {dt}")
    if not (t_end > 0 and math.isfinite(t_end)):
        raise ConfigError("time.t_end", f"must be positive, got {t_end}")
    if integrator not in INTEGRATORS:
        raise ConfigError("time.integrator", f"must be one of {INTEGRATORS}, got {integrator!r}")

    ic_sec = doc.get("initial_condition", {})
    kind = _get(ic_sec, "initial_condition", "kind", "taylor_green")
    if kind not in INITIAL_KINDS:
        raise ConfigError("initial_condition.kind", f"must be one of {INITIAL_KINDS}, got {kind!r}")
    ic_kwargs: dict[str, Any] = {"kind": kind}
    for key in ("amplitude", "wavenumber", "seed", "spectrum_slope"):
        if key in ic_sec:
            v = _get(ic_sec, "initial_condition", key)
            ic_kwargs[key] = float(v) if key in ("amplitude", "spectrum_slope") else v
    if kind == "random_divfree" and "seed" not in ic_kwargs:
        raise ConfigError("initial_condition.seed", "random_divfree requires a seed")
    ic = _wrap("initial_condition", InitialCondition, **ic_kwargs)

    dg = doc.get("diagnostics", {})
    every = _get(dg, "diagnostics", "every", 1)
    if every < 1:
        raise ConfigError("diagnostics.every", f"must be a positive integer, got {every}")
    s = float(_get(dg, "diagnostics", "sobolev_order_s", 3.0))
    if s < 0:
        raise ConfigError("diagnostics.sobolev_order_s", f"must be >= 0, got {s}")
    ceiling = float(_get(dg, "diagnostics", "blowup_ceiling", 1e12))
    if not ceiling > 0:
        raise ConfigError("diagnostics.blowup_ceiling", f"must be positive, got {ceiling}")
    ck = _get(dg, "diagnostics", "checkpoint_every", 0)
    if ck < 0:
        raise ConfigError("diagnostics.checkpoint_every", f"must be >= 0, got {ck}")

    return RunConfig(
        grid=grid,
        indices=indices,
        dt=dt,
        t_end=t_end,
        integrator=integrator,
        initial_condition=ic,
        diagnostics_every=every,
        sobolev_order_s=s,
        blowup_ceiling=ceiling,
        checkpoint_every=ck,
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"malformed: {exc}") from None
    return config_from_mapping(doc)


def config_to_mapping(config: RunConfig) -> dict[str, dict[str, Any]]:
    """Sectioned mapping that :func:`config_from_mapping` maps back to ``config``."""
    ic = config.initial_condition
    ic_map: dict[str, Any] = {
        "kind": ic.kind,
        "amplitude": ic.amplitude,
        "wavenumber": ic.wavenumber,
        "spectrum_slope": ic.spectrum_slope,
    }
    if ic.seed is not None:
        ic_map["seed"] = ic.seed
    return {
        "grid": {
            "n1": config.grid.n1,
            "n2": config.grid.n2,
            "n3": config.grid.n3,
            "box_length": config.grid.box_length,
        },
        "indices": {
            "alpha": config.indices.alpha,
            "beta": config.indices.beta,
            "gamma": config.indices.gamma,
        },
        "time": {"dt": config.dt, "t_end": config.t_end, "integrator": config.integrator},
        "initial_condition": ic_map,
        "diagnostics": {
            "every": config.diagnostics_every,
            "sobolev_order_s": config.sobolev_order_s,
            "blowup_ceiling": config.blowup_ceiling,
            "checkpoint_every": config.checkpoint_every,
        },
    }
