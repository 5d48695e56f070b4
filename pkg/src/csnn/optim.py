"""Adam optimizer, plateau learning-rate scheduler, center-value correction.

The optimizer is a plain full-batch Adam with bias correction; everything is
deterministic given its inputs.  The scheduler multiplies the learning rate
by ``factor`` whenever the loss fails to strictly improve on the best value
seen for ``patience`` consecutive observations; seed ``best`` with the loss
at the initial parameters so the very first stalled observation counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import param_to_physical, stretch_z
from .model import TensorModel
from .problems import ProblemSpec


@dataclass
class AdamState:
    """First/second moment estimates plus step count for one parameter group."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray | None = None
    v: np.ndarray | None = None


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """One Adam update; mutates the state, returns the new parameters."""
    params = np.asarray(params, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if params.shape != grads.shape:
        raise ValueError(
            f"parameter shape {params.shape} does not match gradient shape {grads.shape}"
        )
    if not np.all(np.isfinite(grads)):
        raise FloatingPointError("non-finite gradient encountered in adam_step")
    if state.m is None:
        state.m = np.zeros_like(params)
        state.v = np.zeros_like(params)
    state.step += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = state.m / (1.0 - state.beta1**state.step)
    v_hat = state.v / (1.0 - state.beta2**state.step)
    return params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


@dataclass
class PlateauScheduler:
    """Reduce-on-plateau: lr *= factor after `patience` non-improving losses.

    Improvement means strictly smaller than the best loss seen.  ``best``
    defaults to +inf; trainers seed it with the pre-training loss so a flat
    loss stream stalls from its first observation.
    """

    lr: float
    factor: float
    patience: int
    best: float = math.inf
    min_lr: float = 0.0
    stall_count: int = field(default=0, init=False)
    reductions: int = field(default=0, init=False)

    def __post_init__(self):
        if not 0.0 < self.factor < 1.0:
            raise ValueError(f"factor must be in (0, 1), got {self.factor}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")

    def observe(self, loss: float) -> float:
        """Record one loss value; returns the (possibly reduced) lr."""
        if not math.isfinite(loss):
            raise FloatingPointError(f"non-finite loss {loss!r} observed")
        if loss < self.best:
            self.best = loss
            self.stall_count = 0
        else:
            self.stall_count += 1
            if self.stall_count >= self.patience:
                self.lr = max(self.lr * self.factor, self.min_lr)
                self.reductions += 1
                self.stall_count = 0
        return self.lr


def scheduler_observe(s: PlateauScheduler, loss: float) -> float:
    return s.observe(loss)


@dataclass(frozen=True)
class CorrectionPolicy:
    """Schedule for center-value corrections during training."""

    threshold: int = 1000  # iterations before corrections begin
    interval: int = 100
    h: float = 1e-3

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("correction radius h must be positive")
        if self.interval < 1:
            raise ValueError("correction interval must be >= 1")

    def due(self, iteration: int) -> bool:
        return iteration >= self.threshold and iteration % self.interval == 0


def u0_correction(policy: CorrectionPolicy, m: TensorModel, spec: ProblemSpec) -> float:
    """Five-point estimate of the trial solution's center value.

    Solving the five-point difference approximation of -Lap u = f at the
    origin for u(0,0) gives

        u0_bar = (u(h,0) + u(-h,0) + u(0,h) + u(0,-h)) / 4 + h^2 f(0,0) / 4,

    with the trial solution evaluated at the four physical points through the
    inverse stretching map.
    """
    if not spec.has_u0:
        raise ValueError(f"problem {spec.name} has no center value to correct")
    if m.u0 is None:
        raise ValueError("model carries no u0 parameter")
    h = policy.h
    if h >= spec.dmap.f2:
        raise ValueError(f"correction radius {h} leaves the domain")
    z = stretch_z(h, 0.0, spec.dmap)
    # angles 0, pi/2, pi, 3pi/2 in the t = theta/pi - 1 convention
    pts = np.array([[z, -1.0], [z, -0.5], [z, 0.0], [z, 0.5]])
    trial = spec.trial_batch(m, pts)
    center = np.zeros((1, 2))
    center[0, 0] = -1.0  # parameter image of the origin
    f0 = float(spec.forcing_batch(center)[0])
    return float(np.mean(trial) + h * h * f0 / 4.0)
