"""On-disk formats: energy time series, manifests and checkpoints.

``energy.csv``
    Header line with the columns of :data:`anisons.diagnostics.CSV_COLUMNS`
    in that order, then one row per report. Numbers use ``%.17g`` so every
    value round-trips exactly.

``manifest.json``
    Run metadata (see :func:`new_manifest`), including the parsed config,
    the CSV schema version, seed, timestamps and the termination record.

Checkpoint (``*.bin``), all little-endian::

    offset  size  field
         0     8  magic b"ANSCKPT1"
         8     4  format version (uint32, currently 1)
        12    12  n1, n2, n3 (uint32 each)
        24     8  box_length (float64)
        32    24  alpha, beta, gamma (float64 each)
        56     8  t (float64)
        64     8  step_count (uint64)
        72     8  dt (float64)
        80     1  integrator code (uint8: 0 etd1, 1 etdrk2, 2 imex_cn)
        81     1  has_prev_nonlinear (uint8)
        82     6  zero padding
        88     -  velocity coefficients, complex128, C order,
                  shape (3, n1, n2, n3 // 2 + 1)
         -     -  previous nonlinear term, same layout (only if flagged)
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import struct
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .diagnostics import CSV_COLUMNS, EnergyReport
from .integrators import INTEGRATORS
from .lattice import GridSpec
from .solver import SolverState
from .symbol import MultiplierIndices

CSV_SCHEMA_VERSION = 1
MANIFEST_SCHEMA_VERSION = 1

CHECKPOINT_MAGIC = b"ANSCKPT1"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<8sIIIIdddddQdBB6x")
assert _HEADER.size == 88


class CheckpointError(ValueError):
    pass


def format_number(x: float) -> str:
    return "%.17g" % x


def csv_header() -> str:
    return ",".join(CSV_COLUMNS) + "\n"


def csv_line(report: EnergyReport) -> str:
    return ",".join(format_number(v) for v in report.row()) + "\n"


def write_energy_csv(path: Path, reports: Iterable[EnergyReport]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_header())
        for rep in reports:
            fh.write(csv_line(rep))


def read_energy_csv(path: Path, theorem_regime: bool = False) -> list[EnergyReport]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected energy.csv columns {header}")
        return [EnergyReport.from_row(row, theorem_regime) for row in reader if row]


def utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def jsonable(obj: Any) -> Any:
    """Replace non-finite floats by strings so the output stays strict JSON."""
    if isinstance(obj, float) or isinstance(obj, np.floating):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def dump_json(path: Path, obj: Any) -> None:
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n")


def load_json(path: Path) -> Any:
    return json.loads(Path(path).read_text())


def new_manifest(config_map: dict, config_text: str | None, seed: int | None, theorem_regime: bool) -> dict:
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "csv_schema": {"version": CSV_SCHEMA_VERSION, "columns": list(CSV_COLUMNS)},
        "code_version": __version__,
        "config": config_map,
        "config_text": config_text,
        "seed": seed,
        "theorem_regime": theorem_regime,
        "started_at": utc_now(),
        "finished_at": None,
        "termination": None,
        "resumes": [],
    }


# ----------------------------------------------------------------------------
# checkpoints


def write_checkpoint(
    path: Path,
    state: SolverState,
    grid: GridSpec,
    indices: MultiplierIndices,
    dt: float,
    integrator: str,
) -> None:
    u = np.ascontiguousarray(state.u, dtype="<c16")
    if u.shape != (3,) + grid.spectral_shape:
        raise CheckpointError(f"state shape {u.shape} does not match grid {grid.shape}")
    has_prev = state.prev_nonlinear is not None
    header = _HEADER.pack(
        CHECKPOINT_MAGIC,
        CHECKPOINT_VERSION,
        grid.n1,
        grid.n2,
        grid.n3,
        grid.box_length,
        indices.alpha,
        indices.beta,
        indices.gamma,
        state.t,
        state.step_count,
        dt,
        INTEGRATORS.index(integrator),
        int(has_prev),
    )
    buf = io.BytesIO()
    buf.write(header)
    buf.write(u.tobytes(order="C"))
    if has_prev:
        buf.write(np.ascontiguousarray(state.prev_nonlinear, dtype="<c16").tobytes(order="C"))
    Path(path).write_bytes(buf.getvalue())


class CheckpointHeader:
    def __init__(self, fields: Sequence):
        (
            _magic,
            self.version,
            n1,
            n2,
            n3,
            box,
            alpha,
            beta,
            gamma,
            self.t,
            self.step_count,
            self.dt,
            code,
            has_prev,
        ) = fields
        self.grid = GridSpec(int(n1), int(n2), int(n3), float(box))
        self.indices = MultiplierIndices(alpha, beta, gamma)
        if code >= len(INTEGRATORS):
            raise CheckpointError(f"unknown integrator code {code}")
        self.integrator = INTEGRATORS[code]
        self.has_prev = bool(has_prev)


def read_checkpoint(path: Path) -> tuple[CheckpointHeader, SolverState]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size or data[:8] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic bytes)")
    try:
        header = CheckpointHeader(_HEADER.unpack_from(data, 0))
    except (ValueError, TypeError) as exc:
        raise CheckpointError(f"{path}: corrupt header: {exc}") from None
    if header.version != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {header.version}")
    shape = (3,) + header.grid.spectral_shape
    count = int(np.prod(shape))
    expected = _HEADER.size + 16 * count * (2 if header.has_prev else 1)
    if len(data) != expected:
        raise CheckpointError(f"{path}: size {len(data)} does not match header (expected {expected})")
    u = np.frombuffer(data, dtype="<c16", count=count, offset=_HEADER.size).reshape(shape).copy()
    prev = None
    if header.has_prev:
        prev = (
            np.frombuffer(data, dtype="<c16", count=count, offset=_HEADER.size + 16 * count)
            .reshape(shape)
            .copy()
        )
    return header, SolverState(t=header.t, u=u, step_count=int(header.step_count), prev_nonlinear=prev)
