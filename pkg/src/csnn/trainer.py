"""Collocation sampling, loss assembly, and the full-batch training loop.

Every benchmark residual is linear in the trainable parameters, so the whole
collocation residual over a fixed sample set is an affine map R theta - b.
The trainer assembles (R, b) once, then iterates Adam on the exact quadratic
loss mean((R theta - b)^2); gradients are closed-form, never approximated.
One iteration = one full-batch gradient step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .chebyshev import cgl_rule
from .config import ResolvedConfig, resolve, TrainConfig
from .model import TensorModel
from .optim import AdamState, CorrectionPolicy, PlateauScheduler, adam_step, u0_correction
from .problems import ProblemSpec, catalog


@dataclass(frozen=True)
class SampleSet:
    """Tensor-product collocation grid; no point touches a non-periodic face."""

    axes_nodes: tuple[np.ndarray, ...]
    provenance: tuple[str, ...]

    @property
    def n_points(self) -> int:
        out = 1
        for nodes in self.axes_nodes:
            out *= len(nodes)
        return out

    def points(self) -> np.ndarray:
        """All grid points, shape (n_points, dims), row-major in axis order."""
        grids = np.meshgrid(*self.axes_nodes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)


def build_sample_set(spec: ProblemSpec, cfg: ResolvedConfig | None = None,
                     samples=None) -> SampleSet:
    """Interior CGL nodes on Chebyshev axes, uniform [-1, 1) on periodic axes."""
    counts = samples if samples is not None else cfg.samples
    if len(counts) != spec.dims:
        raise ValueError(f"expected {spec.dims} sample counts, got {len(counts)}")
    nodes = []
    provenance = []
    for ax, count in zip(spec.axes, counts):
        count = int(count)
        if ax.family == "chebyshev_bc":
            if count < 2:
                raise ValueError(f"CGL order must be >= 2, got {count}")
            nodes.append(cgl_rule(count).interior_nodes)
            provenance.append(f"cgl-interior-{count}")
        else:
            if count < 1:
                raise ValueError(f"uniform sample count must be >= 1, got {count}")
            nodes.append(-1.0 + 2.0 * np.arange(count) / count)
            provenance.append(f"uniform-{count}")
    return SampleSet(axes_nodes=tuple(nodes), provenance=tuple(provenance))


@dataclass(frozen=True)
class ResidualSystem:
    """Dense affine form of the collocation residual: residual = R theta - b.

    theta stacks the flattened weight tensor, plus the center value u0 as a
    trailing column when the problem carries one.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    weight_shape: tuple[int, ...]
    has_u0: bool

    @property
    def n_params(self) -> int:
        return self.matrix.shape[1]

    def pack(self, weights: np.ndarray, u0: float | None) -> np.ndarray:
        flat = weights.reshape(-1)
        if self.has_u0:
            if u0 is None:
                raise ValueError("system expects a u0 value")
            return np.concatenate([flat, [float(u0)]])
        return flat

    def unpack(self, theta: np.ndarray) -> tuple[np.ndarray, float | None]:
        if self.has_u0:
            return theta[:-1].reshape(self.weight_shape), float(theta[-1])
        return theta.reshape(self.weight_shape), None

    def residual_vec(self, theta: np.ndarray) -> np.ndarray:
        return self.matrix @ theta - self.rhs

    def loss(self, theta: np.ndarray) -> float:
        r = self.residual_vec(theta)
        return float(r @ r / r.size)

    def loss_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        r = self.residual_vec(theta)
        return float(r @ r / r.size), (2.0 / r.size) * (self.matrix.T @ r)


def assemble_system(spec: ProblemSpec, families, samples: SampleSet) -> ResidualSystem:
    """Build the dense residual matrix and right-hand side for a sample set."""
    nodes = samples.axes_nodes
    points = samples.points()
    n = points.shape[0]
    weight_shape = tuple(f.size for f in families)
    n_weights = int(np.prod(weight_shape))
    matrix_w = np.zeros((n, n_weights))
    rhs = spec.forcing_batch(points)
    u0_col = np.zeros(n) if spec.has_u0 else None
    lift_u0 = 0.0 if spec.has_u0 else None
    for idx, coeff in spec.operator(points):
        kron = families[0].value_matrix(nodes[0], order=idx[0])
        for axis in range(1, len(families)):
            kron = np.kron(kron, families[axis].value_matrix(nodes[axis], order=idx[axis]))
        matrix_w += coeff[:, None] * kron
        rhs -= coeff * spec.lifting.partial(points, idx, lift_u0)
        if spec.has_u0:
            u0_col += coeff * spec.lifting.u0_sens(points, idx)
    if spec.has_u0:
        matrix = np.concatenate([matrix_w, u0_col[:, None]], axis=1)
    else:
        matrix = matrix_w
    return ResidualSystem(matrix=matrix, rhs=rhs, weight_shape=weight_shape,
                          has_u0=spec.has_u0)


def loss(spec: ProblemSpec, m: TensorModel, samples: SampleSet) -> float:
    """Mean squared collocation residual of the trial solution."""
    r = spec.residual_batch(m, samples.points())
    return float(r @ r / r.size)


def loss_gradient(spec: ProblemSpec, m: TensorModel, samples: SampleSet):
    """Exact loss gradient: (weight-tensor gradient, u0 gradient or None)."""
    system = assemble_system(spec, m.families, samples)
    theta = system.pack(m.weights, m.u0)
    _, grad = system.loss_grad(theta)
    grad_w, grad_u0 = system.unpack(grad)
    return grad_w, grad_u0


@dataclass
class RunReport:
    """Per-iteration training log plus final norms and timing."""

    problem: str
    sizes: tuple[int, ...]
    sample_counts: tuple[int, ...]
    iterations: np.ndarray
    losses: np.ndarray
    lrs: np.ndarray
    u0s: np.ndarray | None
    final_loss: float
    seconds: float
    errors: object | None = None  # verify.ErrorReport, attached by callers

    def loss_csv(self) -> str:
        lines = ["iter,loss,lr,u0"]
        for i in range(len(self.iterations)):
            u0 = "" if self.u0s is None else "%.17g" % self.u0s[i]
            lines.append(
                "%d,%.17g,%.17g,%s" % (self.iterations[i], self.losses[i], self.lrs[i], u0)
            )
        return "\n".join(lines) + "\n"


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; carries the last finite model and partial log."""

    def __init__(self, message: str, model: TensorModel, report: RunReport):
        super().__init__(message)
        self.model = model
        self.report = report


def _initial_theta(system: ResidualSystem, rc: ResolvedConfig) -> np.ndarray:
    if rc.init == "zero":
        return np.zeros(system.n_params)
    rng = np.random.default_rng(rc.seed)
    return rng.uniform(-rc.init_scale, rc.init_scale, size=system.n_params)


def train(spec_or_name, cfg: TrainConfig | ResolvedConfig) -> tuple[TensorModel, RunReport]:
    """Full-batch Adam with plateau scheduling per the resolved config.

    The scheduler's best-loss baseline is the loss at the initial parameters.
    Center-value corrections run on their policy schedule when the problem
    carries u0.  Deterministic: zero init, fixed reduction order.
    """
    spec = spec_or_name if isinstance(spec_or_name, ProblemSpec) else catalog(spec_or_name)
    rc = cfg if isinstance(cfg, ResolvedConfig) else resolve(cfg)
    if rc.problem != spec.name:
        raise ValueError(f"config is for {rc.problem!r}, not {spec.name!r}")
    start = time.perf_counter()
    families = spec.build_families(rc.sizes)
    samples = build_sample_set(spec, rc)
    system = assemble_system(spec, families, samples)
    n = system.rhs.size

    theta = _initial_theta(system, rc)
    w_slice = slice(0, system.n_params - 1 if spec.has_u0 else system.n_params)
    # Adam moves each coordinate by at most lr per step, so optimize the
    # weights in units of the problem's output scale; u0 stays in physical
    # units (the correction overwrites it directly).
    scale = rc.scale
    w_adam = AdamState(lr=rc.lr)
    u0_adam = AdamState(lr=rc.u0_lr) if spec.has_u0 else None

    base_loss = system.loss(theta)
    sched = PlateauScheduler(lr=rc.lr, factor=rc.factor, patience=rc.patience,
                             best=base_loss, min_lr=rc.min_lr)
    u0_sched = (
        PlateauScheduler(lr=rc.u0_lr, factor=rc.u0_factor, patience=rc.u0_patience,
                         best=base_loss, min_lr=rc.min_lr)
        if spec.has_u0
        else None
    )
    policy = CorrectionPolicy(threshold=rc.correction_threshold,
                              interval=rc.correction_interval, h=rc.correction_h)

    total = rc.iterations
    iters = np.arange(1, total + 1)
    losses = np.empty(total)
    lrs = np.empty(total)
    u0s = np.empty(total) if spec.has_u0 else None

    def snapshot(th) -> TensorModel:
        weights, u0 = system.unpack(th)
        return TensorModel(families=families, weights=weights.copy(), u0=u0)

    # Full-batch Adam on a quadratic can burst after converging (second-moment
    # memory decays faster than the gradient); keep the best iterate seen.
    best_loss = base_loss
    best_theta = theta.copy()
    last_good = theta.copy()
    r = system.residual_vec(theta)
    for k in range(total):
        it = k + 1
        grad = (2.0 / n) * (system.matrix.T @ r)
        w_adam.lr = sched.lr
        theta[w_slice] = scale * adam_step(
            w_adam, theta[w_slice] / scale, scale * grad[w_slice]
        )
        if spec.has_u0:
            u0_adam.lr = u0_sched.lr
            theta[-1:] = adam_step(u0_adam, theta[-1:], grad[-1:])
        if spec.has_u0 and rc.correction_enabled and policy.due(it):
            theta[-1] = u0_correction(policy, snapshot(theta), spec)
        r = system.residual_vec(theta)
        cur = float(r @ r / n)
        losses[k] = cur
        lrs[k] = w_adam.lr
        if u0s is not None:
            u0s[k] = theta[-1]
        if not np.isfinite(cur):
            report = RunReport(
                problem=spec.name, sizes=rc.sizes, sample_counts=rc.samples,
                iterations=iters[:it], losses=losses[:it], lrs=lrs[:it],
                u0s=None if u0s is None else u0s[:it],
                final_loss=float(losses[k - 1]) if k else base_loss,
                seconds=time.perf_counter() - start,
            )
            raise TrainingDiverged(
                f"loss became non-finite at iteration {it}", snapshot(last_good), report
            )
        last_good = theta.copy()
        if cur < best_loss:
            best_loss = cur
            best_theta = theta.copy()
        sched.observe(cur)
        if u0_sched is not None:
            u0_sched.observe(cur)

    report = RunReport(
        problem=spec.name, sizes=rc.sizes, sample_counts=rc.samples,
        iterations=iters, losses=losses, lrs=lrs, u0s=u0s,
        final_loss=best_loss,
        seconds=time.perf_counter() - start,
    )
    return snapshot(best_theta), report
