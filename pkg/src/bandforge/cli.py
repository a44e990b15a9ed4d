"""``forge`` command line: build, verify and export runs."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .config import RunConfig
from .errors import ConfigError, ForgeError
from .verify import (
    basis_digest,
    basis_from_state,
    entry_grid,
    export_decay,
    export_matrix,
    seed_family,
    verify_run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONSTRUCTION = 3
EXIT_AUDIT = 4

log = logging.getLogger("bandforge")


def _emit(payload, code):
    click.echo(json.dumps(payload, sort_keys=True))
    sys.exit(code)


def _write_run(out, cfg, state):
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    (out / "state.json").write_text(json.dumps(state.to_json(), sort_keys=True) + "\n")
    with open(out / "steps.jsonl", "w") as fh:
        for rec, u in zip(state.records, state.us):
            doc = rec.to_json()
            doc["basis_sha256"] = basis_digest(u)
            fh.write(json.dumps(doc, sort_keys=True) + "\n")


def _load_run(run):
    run = Path(run)
    missing = [f for f in ("config.json", "state.json") if not (run / f).is_file()]
    if missing:
        raise ConfigError(f"run directory {run} lacks {missing}")
    cfg = RunConfig.load(run / "config.json")
    try:
        state = json.loads((run / "state.json").read_text())
        records = []
        if (run / "steps.jsonl").is_file():
            records = [json.loads(line) for line in (run / "steps.jsonl").read_text().splitlines() if line.strip()]
    except (json.JSONDecodeError, OSError) as exc:
        raise ConfigError(f"cannot read run files: {exc}") from exc
    if "basis" not in state:
        raise ConfigError("state.json has no basis")
    return cfg, state, records


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Build orthonormal bases with prescribed matrix structure."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Construction config (JSON).")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Run directory to create.")
def build(config_path, out_dir):
    """Run a construction and audit it."""
    try:
        cfg = RunConfig.load(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        _emit({"status": "config_error", "error": str(exc)}, EXIT_CONFIG)
    out = Path(out_dir)

    def progress(rec):
        log.info("step %d (m=%s)", rec.n, rec.m)

    try:
        state = cfg.run(on_step=progress)
    except ForgeError as exc:
        step = getattr(exc, "step", None)
        partial = getattr(exc, "partial", None)
        if partial is not None and partial.n:
            _write_run(out, cfg, partial)
        click.echo(f"construction failed at step {step}: {exc}", err=True)
        _emit(
            {"status": "construction_failed", "step": step, "error": str(exc),
             "completed": partial.n if partial is not None else 0},
            EXIT_CONSTRUCTION,
        )
    _write_run(out, cfg, state)
    _, doc, records = _load_run(out)
    report = verify_run(cfg, doc, records)
    (out / "report.json").write_text(report.dumps() + "\n")
    payload = {"status": "ok" if report.passed else "audit_failed", "steps": state.n, "pass": report.passed,
               "out": str(out), "failed": report.failed()}
    _emit(payload, EXIT_OK if report.passed else EXIT_AUDIT)


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(), help="Run directory from `forge build`.")
def verify(run_dir):
    """Recompute every check of a run and rewrite its report."""
    try:
        cfg, doc, records = _load_run(run_dir)
        report = verify_run(cfg, doc, records)
    except (ForgeError, KeyError, TypeError, ValueError) as exc:
        click.echo(f"cannot verify: {exc}", err=True)
        _emit({"status": "config_error", "error": str(exc)}, EXIT_CONFIG)
    (Path(run_dir) / "report.json").write_text(report.dumps() + "\n")
    _emit({"status": "ok" if report.passed else "audit_failed", "pass": report.passed, "failed": report.failed()},
          EXIT_OK if report.passed else EXIT_AUDIT)


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(), help="Run directory from `forge build`.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--size", type=int, required=True, help="Leading k x k block of the matrix.")
def export(run_dir, fmt, size):
    """Write the leading matrix block and the seed decay curve."""
    try:
        cfg, doc, records = _load_run(run_dir)
    except ForgeError as exc:
        click.echo(f"cannot export: {exc}", err=True)
        _emit({"status": "config_error", "error": str(exc)}, EXIT_CONFIG)
    us = basis_from_state(doc)
    if not 0 <= size <= len(us):
        click.echo(f"size {size} exceeds the {len(us)} built vectors", err=True)
        _emit({"status": "config_error", "error": f"size {size} out of range 0..{len(us)}"}, EXIT_CONFIG)
    run = Path(run_dir)
    grid = entry_grid(cfg.operator_model(), us, size)
    mpath = run / f"matrix_{size}.{fmt}"
    mpath.write_text(export_matrix(grid, fmt))
    dpath = run / "decay.csv"
    dpath.write_text(export_decay(us, seed_family(doc), [(r["n"], r["m"]) for r in records]))
    _emit({"status": "ok", "matrix": str(mpath), "decay": str(dpath)}, EXIT_OK)


if __name__ == "__main__":
    main()
