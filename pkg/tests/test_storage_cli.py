import json
import math

import numpy as np
import pytest

from anisons.cli import main
from anisons.diagnostics import CSV_COLUMNS
from anisons.storage import CheckpointError, read_checkpoint, read_energy_csv, write_checkpoint
from anisons.lattice import GridSpec
from anisons.solver import SolverState
from anisons.verify import run_suite

from conftest import THEOREM

CONFIG = """
[grid]
n = 16
[indices]
alpha = 1.5
beta = 1.0
gamma = 1.25
[time]
dt = 0.01
t_end = {t_end}
integrator = "{integrator}"
[initial_condition]
kind = "{kind}"
amplitude = {amplitude}
{extra}
[diagnostics]
checkpoint_every = {ck}
"""


def write_config(tmp_path, name="run.toml", t_end=0.1, integrator="etdrk2", kind="random_divfree",
                 amplitude=1.0, extra="seed = 5", ck=0):
    p = tmp_path / name
    p.write_text(CONFIG.format(t_end=t_end, integrator=integrator, kind=kind, amplitude=amplitude, extra=extra, ck=ck))
    return p


def test_checkpoint_round_trip(tmp_path, rng):
    grid = GridSpec(8, 6, 4)
    u = rng.standard_normal((3,) + grid.spectral_shape) + 1j * rng.standard_normal((3,) + grid.spectral_shape)
    prev = 2 * u
    path = tmp_path / "c.bin"
    write_checkpoint(path, SolverState(0.37, u, 37, prev), grid, THEOREM, 0.01, "imex_cn")
    head, st = read_checkpoint(path)
    assert head.grid == grid and head.indices == THEOREM
    assert head.integrator == "imex_cn" and head.dt == 0.01
    assert st.t == 0.37 and st.step_count == 37
    assert np.array_equal(st.u, u) and np.array_equal(st.prev_nonlinear, prev)
    data = path.read_bytes()
    assert data[:8] == b"ANSCKPT1" and len(data) == 88 + 2 * 16 * u.size


def test_checkpoint_corruption_rejected(tmp_path, rng):
    grid = GridSpec.cube(4)
    u = np.zeros((3,) + grid.spectral_shape, dtype=complex)
    path = tmp_path / "c.bin"
    write_checkpoint(path, SolverState(0.0, u), grid, THEOREM, 0.1, "etd1")
    data = bytearray(path.read_bytes())
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXXXXXX" + bytes(data[8:]))
    with pytest.raises(CheckpointError):
        read_checkpoint(bad)
    bad.write_bytes(bytes(data[:-16]))
    with pytest.raises(CheckpointError):
        read_checkpoint(bad)


def test_run_writes_outputs(tmp_path):
    cfg = write_config(tmp_path, ck=5)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "energy.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 12
    man = json.loads((out / "manifest.json").read_text())
    assert man["termination"] == "completed"
    assert man["theorem_regime"] is True
    assert man["csv_schema"]["columns"] == list(CSV_COLUMNS)
    assert (out / "checkpoint.bin").exists()
    assert (out / "checkpoint_00000005.bin").exists() and (out / "checkpoint_00000010.bin").exists()


def test_zero_data_rows_are_zero(tmp_path):
    cfg = write_config(tmp_path, kind="taylor_green", amplitude=0.0, extra="")
    out = tmp_path / "z"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    for r in read_energy_csv(out / "energy.csv"):
        assert all(v == 0 for v in r.row()[1:])


def test_shear_l2_column_decays(tmp_path):
    cfg = write_config(tmp_path, kind="shear_x3", extra="wavenumber = 1", t_end=0.2)
    out = tmp_path / "s"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_energy_csv(out / "energy.csv")
    for r in rows:
        assert abs(r.l2_sq - rows[0].l2_sq * math.exp(-2 * r.t)) <= 1e-8 * rows[0].l2_sq


def test_seed_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path)
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "9"])
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "energy.csv").read_bytes()
    b = (tmp_path / "b" / "energy.csv").read_bytes()
    assert a != b
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["seed"] == 9


def test_blow_up_exit_code(tmp_path):
    cfg = write_config(tmp_path)
    cfg.write_text(cfg.read_text().replace("checkpoint_every = 0", "checkpoint_every = 0\nblowup_ceiling = 1e-6"))
    out = tmp_path / "b"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 2
    assert json.loads((out / "manifest.json").read_text())["termination"] == "blow_up_indicator"


def test_bad_config_exit_code(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[indices]\nalpha = 1\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 1


@pytest.mark.parametrize("integrator", ["etdrk2", "imex_cn"])
def test_split_resume_matches_unsplit(tmp_path, integrator):
    full = tmp_path / "full"
    split = tmp_path / "split"
    main(["run", "--config", str(write_config(tmp_path, "f.toml", 0.2, integrator)), "--out", str(full)])
    main(["run", "--config", str(write_config(tmp_path, "s.toml", 0.1, integrator)), "--out", str(split)])
    assert main(["resume", "--checkpoint", str(split / "checkpoint.bin"), "--t-end", "0.2"]) == 0
    a = read_energy_csv(full / "energy.csv")
    b = read_energy_csv(split / "energy.csv")
    assert len(a) == len(b) == 21
    for ra, rb in zip(a, b):
        assert np.allclose(ra.row(), rb.row(), rtol=1e-12, atol=0)
    man = json.loads((split / "manifest.json").read_text())
    assert man["resumes"][0]["from_t"] == pytest.approx(0.1)
    assert man["t_end"] == 0.2


def test_resume_at_end_is_noop(tmp_path):
    out = tmp_path / "r"
    main(["run", "--config", str(write_config(tmp_path)), "--out", str(out)])
    before = (out / "energy.csv").read_bytes()
    assert main(["resume", "--checkpoint", str(out / "checkpoint.bin"), "--t-end", "0.1"]) == 0
    assert (out / "energy.csv").read_bytes() == before


def test_resume_rejects_mismatched_header(tmp_path):
    out = tmp_path / "r"
    main(["run", "--config", str(write_config(tmp_path)), "--out", str(out)])
    head, st = read_checkpoint(out / "checkpoint.bin")
    write_checkpoint(out / "other.bin", st, head.grid, head.indices, 0.02, head.integrator)
    assert main(["resume", "--checkpoint", str(out / "other.bin"), "--t-end", "0.2"]) == 1
    corrupt = out / "corrupt.bin"
    corrupt.write_bytes(b"BADMAGIC" + (out / "checkpoint.bin").read_bytes()[8:])
    assert main(["resume", "--checkpoint", str(corrupt), "--t-end", "0.2"]) == 1


def test_verify_identities_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--suite", "identities", "--seed", "1", "--out", str(a), "--corpus-size", "10"]) == 0
    assert main(["verify", "--suite", "identities", "--seed", "1", "--out", str(b), "--corpus-size", "10"]) == 0
    assert (a / "verdicts.json").read_bytes() == (b / "verdicts.json").read_bytes()
    recs = json.loads((a / "verdicts.json").read_text())["records"]
    names = {r["check"] for r in recs}
    assert {"parseval", "kukavica_identity"} <= names
    assert all(r["pass"] for r in recs)
    assert set(recs[0]) >= {"check", "params", "lhs", "rhs", "ratio", "pass"}


def test_verify_rejects_empty_corpus(tmp_path):
    assert main(["verify", "--suite", "lemmas", "--seed", "1", "--out", str(tmp_path), "--corpus-size", "0"]) == 1
    with pytest.raises(ValueError):
        run_suite("lemmas", 1, 0)
    with pytest.raises(ValueError):
        run_suite("everything", 1, 5)


def test_verify_lemmas_same_seed_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--suite", "lemmas", "--seed", "4", "--out", str(a), "--corpus-size", "15"]) == 0
    main(["verify", "--suite", "lemmas", "--seed", "4", "--out", str(b), "--corpus-size", "15"])
    assert (a / "verdicts.json").read_bytes() == (b / "verdicts.json").read_bytes()
