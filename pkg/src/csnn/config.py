"""Experiment configuration: dataclass, text format, defaults resolution.

Config files are UTF-8 text, one ``key = value`` per line, ``#`` comments,
with optional ``[section]`` headers.  Sections are organizational only; keys
are globally unique.  Any key left unset falls back to the problem's default
hyperparameters.  Recognized sections and keys:

    [problem]     problem, N, sizes, samples, sweep
    [train]       iterations, lr, u0_lr, init, init_scale, seed
    [scheduler]   factor, patience, min_lr, u0_factor, u0_patience
    [correction]  enabled, threshold, interval, h
    [output]      out, cells, checkpoint

Scheduler semantics: "fails to decrease" means no strict improvement of the
best loss seen (exact comparison, no relative epsilon).
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .problems import catalog

_SECTIONS = {
    "problem": ("problem", "N", "sizes", "samples", "sweep"),
    "train": ("iterations", "lr", "u0_lr", "scale", "init", "init_scale", "seed"),
    "scheduler": ("factor", "patience", "min_lr", "u0_factor", "u0_patience"),
    "correction": ("enabled", "threshold", "interval", "h"),
    "output": ("out", "cells", "checkpoint"),
}

_KEY_TO_FIELD = {
    "problem": "problem",
    "N": "N",
    "sizes": "sizes",
    "samples": "samples",
    "sweep": "sweep",
    "iterations": "iterations",
    "lr": "lr",
    "u0_lr": "u0_lr",
    "scale": "scale",
    "init": "init",
    "init_scale": "init_scale",
    "seed": "seed",
    "factor": "factor",
    "patience": "patience",
    "min_lr": "min_lr",
    "u0_factor": "u0_factor",
    "u0_patience": "u0_patience",
    "enabled": "correction_enabled",
    "threshold": "correction_threshold",
    "interval": "correction_interval",
    "h": "correction_h",
    "out": "out",
    "cells": "cells",
    "checkpoint": "checkpoint",
}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}


@dataclass(frozen=True)
class TrainConfig:
    """Raw experiment configuration; None means "use the problem default"."""

    problem: str
    N: int | None = None
    sizes: tuple[int, ...] | None = None
    samples: tuple[int, ...] | None = None
    sweep: tuple[int, ...] | None = None
    iterations: int | None = None
    lr: float | None = None
    u0_lr: float | None = None
    scale: float | None = None
    init: str = "zero"
    init_scale: float = 0.1
    seed: int = 0
    factor: float | None = None
    patience: int | None = None
    min_lr: float = 0.0
    u0_factor: float | None = None
    u0_patience: int | None = None
    correction_enabled: bool | None = None
    correction_threshold: int | None = None
    correction_interval: int | None = None
    correction_h: float | None = None
    out: str | None = None
    cells: int | None = None
    checkpoint: str | None = None


@dataclass(frozen=True)
class ResolvedConfig:
    """Fully populated configuration ready for the trainer."""

    problem: str
    N: int
    sizes: tuple[int, ...]
    samples: tuple[int, ...]
    sweep: tuple[int, ...]
    iterations: int
    lr: float
    u0_lr: float
    scale: float
    init: str
    init_scale: float
    seed: int
    factor: float
    patience: int
    min_lr: float
    u0_factor: float
    u0_patience: int
    correction_enabled: bool
    correction_threshold: int
    correction_interval: int
    correction_h: float
    out: str | None
    cells: int
    checkpoint: str | None


class ConfigError(ValueError):
    pass


def _parse_value(field_name: str, raw: str, line_no: int):
    ann = {f.name: f.type for f in fields(TrainConfig)}[field_name]
    text = raw.strip()

    def fail(expected: str):
        raise ConfigError(
            f"line {line_no}: value {text!r} for {_FIELD_TO_KEY[field_name]!r} "
            f"is not {expected}"
        )

    def as_int(tok):
        try:
            return int(tok)
        except ValueError:
            fail("an integer")

    def as_float(tok):
        try:
            return float(tok)
        except ValueError:
            fail("a number")

    if "tuple" in str(ann):
        return tuple(as_int(tok) for tok in text.replace(",", " ").split())
    if "bool" in str(ann):
        low = text.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        fail("a boolean")
    if "int" in str(ann):
        return as_int(text)
    if "float" in str(ann):
        return as_float(text)
    return text


def parse_config(text: str) -> TrainConfig:
    """Parse the documented key = value format into a TrainConfig."""
    values: dict[str, object] = {}
    section = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {line_no}: malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(
                    f"line {line_no}: unknown section [{section}]; "
                    f"valid: {', '.join(_SECTIONS)}"
                )
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in _KEY_TO_FIELD:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if section is not None and key not in _SECTIONS[section]:
            raise ConfigError(
                f"line {line_no}: key {key!r} does not belong in [{section}]"
            )
        field_name = _KEY_TO_FIELD[key]
        if field_name in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[field_name] = _parse_value(field_name, raw_value, line_no)
    if "problem" not in values:
        raise ConfigError("config must set 'problem'")
    cfg = TrainConfig(**values)
    validate(cfg)
    return cfg


def serialize_config(cfg: TrainConfig) -> str:
    """Canonical text form; emits only keys that differ from field defaults."""
    defaults = TrainConfig(problem=cfg.problem)
    lines = []
    for section, keys in _SECTIONS.items():
        chunk = []
        for key in keys:
            field_name = _KEY_TO_FIELD[key]
            value = getattr(cfg, field_name)
            if value is None or (
                field_name != "problem" and value == getattr(defaults, field_name)
            ):
                continue
            if isinstance(value, tuple):
                rendered = ", ".join(str(v) for v in value)
            elif isinstance(value, bool):
                rendered = "true" if value else "false"
            else:
                rendered = repr(value) if isinstance(value, float) else str(value)
            chunk.append(f"{key} = {rendered}")
        if chunk:
            lines.append(f"[{section}]")
            lines.extend(chunk)
            lines.append("")
    return "\n".join(lines)


def validate(cfg: TrainConfig) -> None:
    def positive(name, value):
        if value is not None and value <= 0:
            raise ConfigError(f"{name} must be positive, got {value}")

    positive("N", cfg.N)
    positive("iterations", cfg.iterations)
    positive("lr", cfg.lr)
    positive("u0_lr", cfg.u0_lr)
    positive("scale", cfg.scale)
    positive("patience", cfg.patience)
    positive("u0_patience", cfg.u0_patience)
    positive("cells", cfg.cells)
    positive("interval", cfg.correction_interval)
    positive("h", cfg.correction_h)
    if cfg.correction_threshold is not None and cfg.correction_threshold < 0:
        raise ConfigError("threshold must be nonnegative")
    for name, value in (("factor", cfg.factor), ("u0_factor", cfg.u0_factor)):
        if value is not None and not 0.0 < value < 1.0:
            raise ConfigError(f"{name} must be in (0, 1), got {value}")
    if cfg.min_lr < 0:
        raise ConfigError(f"min_lr must be nonnegative, got {cfg.min_lr}")
    if cfg.init not in ("zero", "uniform"):
        raise ConfigError(f"init must be 'zero' or 'uniform', got {cfg.init!r}")
    if cfg.init_scale <= 0:
        raise ConfigError(f"init_scale must be positive, got {cfg.init_scale}")
    for name in ("sizes", "samples", "sweep"):
        value = getattr(cfg, name)
        if value is not None and any(v <= 0 for v in value):
            raise ConfigError(f"{name} entries must be positive, got {value}")
    if cfg.sweep is not None and list(cfg.sweep) != sorted(set(cfg.sweep)):
        raise ConfigError(f"sweep must be strictly increasing, got {cfg.sweep}")


def resolve(cfg: TrainConfig) -> ResolvedConfig:
    """Fill every unset field from the problem's default hyperparameters."""
    validate(cfg)
    spec = catalog(cfg.problem)
    h = spec.hyper
    N = cfg.N if cfg.N is not None else h.N
    sizes = cfg.sizes if cfg.sizes is not None else spec.default_sizes(N)
    samples = cfg.samples if cfg.samples is not None else spec.default_samples(N)
    if len(sizes) != spec.dims or len(samples) != spec.dims:
        raise ConfigError(
            f"sizes/samples must have {spec.dims} entries for {spec.name}"
        )
    enabled = (
        cfg.correction_enabled if cfg.correction_enabled is not None else spec.has_u0
    )
    if enabled and not spec.has_u0:
        raise ConfigError(f"problem {spec.name} has no center value to correct")
    return ResolvedConfig(
        problem=cfg.problem,
        N=N,
        sizes=tuple(sizes),
        samples=tuple(samples),
        sweep=cfg.sweep if cfg.sweep is not None else (h.sweep or (N,)),
        iterations=(
            cfg.iterations if cfg.iterations is not None else spec.default_iterations(N)
        ),
        lr=cfg.lr if cfg.lr is not None else h.lr,
        u0_lr=cfg.u0_lr if cfg.u0_lr is not None else h.u0_lr,
        scale=cfg.scale if cfg.scale is not None else h.output_scale,
        init=cfg.init,
        init_scale=cfg.init_scale,
        seed=cfg.seed,
        factor=cfg.factor if cfg.factor is not None else h.factor,
        patience=cfg.patience if cfg.patience is not None else h.patience,
        min_lr=cfg.min_lr,
        u0_factor=cfg.u0_factor if cfg.u0_factor is not None else h.u0_factor,
        u0_patience=(
            cfg.u0_patience if cfg.u0_patience is not None else h.u0_patience
        ),
        correction_enabled=enabled,
        correction_threshold=(
            cfg.correction_threshold
            if cfg.correction_threshold is not None
            else h.correction_threshold
        ),
        correction_interval=(
            cfg.correction_interval
            if cfg.correction_interval is not None
            else h.correction_interval
        ),
        correction_h=(
            cfg.correction_h if cfg.correction_h is not None else h.correction_h
        ),
        out=cfg.out,
        cells=cfg.cells if cfg.cells is not None else h.cells,
        checkpoint=cfg.checkpoint,
    )


def with_order(cfg: TrainConfig, N: int) -> TrainConfig:
    """Copy of cfg pinned to order N with derived fields cleared."""
    return replace(cfg, N=N, sizes=None, samples=None, iterations=cfg.iterations)
