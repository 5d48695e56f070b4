"""Config-driven experiment runner.

Subcommands:
  run            train per the config; writes report.csv, loss.csv, grid.csv,
                 model.ckpt into the output directory
  sweep          convergence study over the config's N list; writes sweep.csv
  oracle         direct least-squares solve; writes report.csv, grid.csv,
                 model.ckpt
  verify         re-evaluate error norms of a saved checkpoint; writes
                 report.csv
  list-problems  print the benchmark catalog

Output directory precedence: --out flag, then $CSNN_OUT, then the config's
[output] out key, then runs/<problem>.  On failure all artifacts written by
the invocation are removed and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import verify as verify_mod
from .config import ConfigError, TrainConfig, parse_config, resolve
from .model import TensorModel, load_checkpoint, save_checkpoint
from .problems import PROBLEM_NAMES, ProblemSpec, catalog
from .trainer import RunReport, build_sample_set, train

_FMT = "%.17g"


def _report_csv(spec: ProblemSpec, rc, *, final_loss, errors, seconds, u0) -> str:
    header = "problem,N,sizes,samples,iterations,final_loss,linf,l2_abs,l2_rel,u0,seconds"
    row = ",".join(
        [
            spec.name,
            str(rc.N),
            "x".join(str(s) for s in rc.sizes),
            "x".join(str(s) for s in rc.samples),
            str(rc.iterations),
            _FMT % final_loss,
            _FMT % errors.linf,
            _FMT % errors.l2_abs,
            _FMT % errors.l2_rel,
            "" if u0 is None else _FMT % u0,
            "%.2f" % seconds,
        ]
    )
    return header + "\n" + row + "\n"


def _sweep_csv(rows) -> str:
    lines = ["N,linf,l2_abs,l2_rel,final_loss,seconds"]
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(row.N),
                    _FMT % row.errors.linf,
                    _FMT % row.errors.l2_abs,
                    _FMT % row.errors.l2_rel,
                    _FMT % row.final_loss,
                    "%.2f" % row.seconds,
                ]
            )
        )
    return "\n".join(lines) + "\n"


class _ArtifactWriter:
    """Collects artifacts in memory, then writes them all at once."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.pending: list[tuple[Path, object]] = []

    def add_text(self, name: str, text: str):
        self.pending.append((self.out_dir / name, text))

    def add_model(self, name: str, model: TensorModel, problem: str):
        self.pending.append((self.out_dir / name, (model, problem)))

    def flush(self) -> list[Path]:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        try:
            for path, payload in self.pending:
                if isinstance(payload, str):
                    path.write_text(payload)
                else:
                    model, problem = payload
                    save_checkpoint(model, path, problem=problem)
                written.append(path)
        except BaseException:
            for path in written:
                path.unlink(missing_ok=True)
            raise
        return written


def _load_config(path: str) -> TrainConfig:
    text = Path(path).read_text()
    return parse_config(text)


def _out_dir(args, cfg: TrainConfig) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get("CSNN_OUT")
    if env:
        return Path(env)
    if cfg.out:
        return Path(cfg.out)
    return Path("runs") / cfg.problem


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    rc = resolve(cfg)
    spec = catalog(rc.problem)
    model, report = train(spec, rc)
    grid = verify_mod.test_grid(spec, rc.cells)
    errors = verify_mod.error_norms(spec, model, grid)
    writer = _ArtifactWriter(_out_dir(args, cfg))
    writer.add_text(
        "report.csv",
        _report_csv(spec, rc, final_loss=report.final_loss, errors=errors,
                    seconds=report.seconds, u0=model.u0),
    )
    writer.add_text("loss.csv", report.loss_csv())
    writer.add_text("grid.csv", verify_mod.grid_dump(spec, model, grid))
    writer.add_model("model.ckpt", model, spec.name)
    paths = writer.flush()
    print(f"{spec.name}: {errors} loss={report.final_loss:.6e} ({report.seconds:.2f}s)")
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    rc = resolve(cfg)
    spec = catalog(rc.problem)
    rows = verify_mod.convergence_study(spec, rc.sweep, cfg)
    writer = _ArtifactWriter(_out_dir(args, cfg))
    writer.add_text("sweep.csv", _sweep_csv(rows))
    paths = writer.flush()
    for row in rows:
        print(f"N={row.N}: {row.errors} ({row.seconds:.2f}s)")
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def _cmd_oracle(args) -> int:
    cfg = _load_config(args.config)
    rc = resolve(cfg)
    spec = catalog(rc.problem)
    samples = build_sample_set(spec, rc)
    result = verify_mod.least_squares_oracle(
        spec, samples, sizes=rc.sizes, cells=rc.cells
    )
    writer = _ArtifactWriter(_out_dir(args, cfg))
    writer.add_text(
        "report.csv",
        _report_csv(spec, rc, final_loss=result.loss, errors=result.errors,
                    seconds=result.seconds, u0=result.model.u0),
    )
    grid = verify_mod.test_grid(spec, rc.cells)
    writer.add_text("grid.csv", verify_mod.grid_dump(spec, result.model, grid))
    writer.add_model("model.ckpt", result.model, spec.name)
    paths = writer.flush()
    print(f"{spec.name} oracle: {result.errors} loss={result.loss:.6e} "
          f"rank={result.rank}/{result.n_params}")
    print("wrote " + ", ".join(str(p) for p in paths))
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    rc = resolve(cfg)
    spec = catalog(rc.problem)
    out_dir = _out_dir(args, cfg)
    ckpt = Path(rc.checkpoint) if rc.checkpoint else out_dir / "model.ckpt"
    if not ckpt.exists():
        raise FileNotFoundError(f"checkpoint not found: {ckpt}")
    model, problem = load_checkpoint(ckpt)
    if problem is not None and problem != spec.name:
        raise ValueError(
            f"checkpoint was trained on {problem!r}, config says {spec.name!r}"
        )
    grid = verify_mod.test_grid(spec, rc.cells)
    errors = verify_mod.error_norms(spec, model, grid)
    writer = _ArtifactWriter(out_dir)
    writer.add_text(
        "report.csv",
        _report_csv(spec, rc, final_loss=float("nan"), errors=errors,
                    seconds=0.0, u0=model.u0),
    )
    writer.flush()
    print(f"{spec.name} checkpoint {ckpt}: {errors}")
    return 0


def _cmd_list_problems(_args) -> int:
    for name in PROBLEM_NAMES:
        print(f"{name:22s} {catalog(name).description}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="csnn",
        description="Spectral collocation solver: train, sweep, and verify benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_config in (
        ("run", _cmd_run, True),
        ("sweep", _cmd_sweep, True),
        ("oracle", _cmd_oracle, True),
        ("verify", _cmd_verify, True),
        ("list-problems", _cmd_list_problems, False),
    ):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True, help="path to config file")
            p.add_argument("--out", help="output directory (overrides config and env)")
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
