"""Command-line entry point: ``anisons run | verify | resume``.

Exit codes: 0 on success, 1 on configuration, integrator or verification
failure, 2 when a run stops on the blow-up indicator.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Sequence

from .config import ConfigError, config_from_mapping, config_to_mapping, parse_config
from .solver import BlowUpError, RunConfig, SolverState, initial_state, iterate
from .storage import (
    CheckpointError,
    csv_header,
    csv_line,
    dump_json,
    load_json,
    new_manifest,
    read_checkpoint,
    read_energy_csv,
    utc_now,
    write_checkpoint,
)
from .verify import SUITES, run_suite

log = logging.getLogger("anisons")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BLOWUP = 2

MANIFEST = "manifest.json"
ENERGY_CSV = "energy.csv"
FINAL_CHECKPOINT = "checkpoint.bin"
VERDICTS = "verdicts.json"


def _with_seed(config: RunConfig, seed: int | None) -> RunConfig:
    if seed is None:
        return config
    ic = dataclasses.replace(config.initial_condition, seed=seed)
    return dataclasses.replace(config, initial_condition=ic)


def _checkpoint(out: Path, state: SolverState, config: RunConfig, name: str) -> None:
    write_checkpoint(out / name, state, config.grid, config.indices, config.dt, config.integrator)


def _drive(
    config: RunConfig,
    out: Path,
    csv_fh,
    state: SolverState | None,
    history: list | None,
    t_end: float | None,
) -> tuple[str, str, SolverState | None]:
    """Stream reports to ``csv_fh`` and write checkpoints. Returns (termination, message, state)."""
    last = state
    try:
        for last, rep in iterate(config, state, history, t_end):
            csv_fh.write(csv_line(rep))
            csv_fh.flush()
            every = config.checkpoint_every
            if every and last.step_count % every == 0 and last.step_count > 0:
                _checkpoint(out, last, config, f"checkpoint_{last.step_count:08d}.bin")
    except BlowUpError as exc:
        if exc.report is not None:
            csv_fh.write(csv_line(exc.report))
        log.error("%s", exc)
        return "blow_up_indicator", str(exc), last
    except (RuntimeError, FloatingPointError) as exc:
        log.error("integrator error: %s", exc)
        return "integrator_error", str(exc), last
    if last is not None:
        _checkpoint(out, last, config, FINAL_CHECKPOINT)
    return "completed", "", last


def _exit_code(termination: str) -> int:
    return {"completed": EXIT_OK, "blow_up_indicator": EXIT_BLOWUP}.get(termination, EXIT_ERROR)


def cmd_run(config_path: str | Path, out_dir: str | Path, seed: int | None = None) -> int:
    text = Path(config_path).read_text()
    try:
        config = _with_seed(parse_config(text), seed)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_ERROR
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = new_manifest(
        config_to_mapping(config), text, config.initial_condition.seed, config.indices.theorem_regime
    )
    manifest["t_end"] = config.t_end
    dump_json(out / MANIFEST, manifest)

    with open(out / ENERGY_CSV, "w", newline="") as fh:
        fh.write(csv_header())
        termination, message, _ = _drive(config, out, fh, initial_state(config), None, None)

    manifest.update(termination=termination, message=message, finished_at=utc_now())
    dump_json(out / MANIFEST, manifest)
    return _exit_code(termination)


def cmd_verify(suite: str, seed: int, out_dir: str | Path, corpus_size: int = 200) -> int:
    if corpus_size < 1:
        log.error("corpus must be nonempty (got corpus size %d)", corpus_size)
        return EXIT_ERROR
    records = run_suite(suite, seed, corpus_size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(
        out / VERDICTS,
        {"suite": suite, "seed": seed, "corpus_size": corpus_size, "records": records},
    )
    failed = [r for r in records if not r["pass"]]
    for r in failed:
        print(f"FAIL {r['check']}: lhs={r['lhs']:.6g} rhs={r['rhs']:.6g}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_ERROR


def cmd_resume(checkpoint_path: str | Path, t_end: float) -> int:
    ckpt = Path(checkpoint_path)
    out = ckpt.parent
    try:
        header, state = read_checkpoint(ckpt)
    except (CheckpointError, OSError) as exc:
        log.error("cannot read checkpoint: %s", exc)
        return EXIT_ERROR
    manifest = load_json(out / MANIFEST)
    config = config_from_mapping(manifest["config"])
    mismatches = [
        name
        for name, stored, wanted in (
            ("grid", header.grid, config.grid),
            ("indices", header.indices, config.indices),
            ("dt", header.dt, config.dt),
            ("integrator", header.integrator, config.integrator),
        )
        if stored != wanted
    ]
    if mismatches:
        log.error("checkpoint header does not match the run manifest: %s", ", ".join(mismatches))
        return EXIT_ERROR

    if t_end <= state.t:
        log.info("t_end %.17g <= checkpoint time %.17g: nothing to do", t_end, state.t)
        return EXIT_OK

    csv_path = out / ENERGY_CSV
    history = [r for r in read_energy_csv(csv_path, config.indices.theorem_regime) if r.t <= state.t]
    if not history or history[-1].t != state.t:
        log.error("energy.csv has no report at the checkpoint time %.17g", state.t)
        return EXIT_ERROR
    # Drop rows past the checkpoint so the appended series stays monotone in t.
    with open(csv_path, "w", newline="") as fh:
        fh.write(csv_header())
        for rep in history:
            fh.write(csv_line(rep))
        resumed_config = dataclasses.replace(config, t_end=t_end)
        termination, message, _ = _drive(resumed_config, out, fh, state, history, t_end)

    manifest.setdefault("resumes", []).append(
        {"from_checkpoint": ckpt.name, "from_t": state.t, "t_end": t_end, "at": utc_now()}
    )
    manifest.update(t_end=t_end, termination=termination, message=message, finished_at=utc_now())
    dump_json(out / MANIFEST, manifest)
    return _exit_code(termination)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisons", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a configured run")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, help="overrides initial_condition.seed")

    p = sub.add_parser("verify", help="check identities and inequalities")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--corpus-size", type=int, default=200)

    p = sub.add_parser("resume", help="continue a run from a checkpoint")
    p.add_argument("--checkpoint", required=True, metavar="PATH")
    p.add_argument("--t-end", type=float, required=True, metavar="REAL")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "run":
        return cmd_run(args.config, args.out, args.seed)
    if args.command == "verify":
        return cmd_verify(args.suite, args.seed, args.out, args.corpus_size)
    return cmd_resume(args.checkpoint, args.t_end)


if __name__ == "__main__":
    sys.exit(main())
