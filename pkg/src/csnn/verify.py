"""Error norms, test grids, convergence sweeps, and the least-squares oracle.

The oracle solves the same collocation system the trainer optimizes, but
directly through an orthogonal factorization (complete orthogonal
decomposition via LAPACK gelsy).  Its loss lower-bounds any trained result on
the same samples, which makes it the tight deterministic check: a trained run
can approach it but never beat it.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import ResolvedConfig, TrainConfig, resolve, with_order
from .model import TensorModel, evaluate_on_grid, zero_model
from .problems import ProblemSpec, catalog
from .trainer import RunReport, SampleSet, assemble_system, build_sample_set, train


@dataclass(frozen=True)
class ErrorReport:
    """Pointwise error norms of a trial solution on a test grid."""

    linf: float
    l2_abs: float
    l2_rel: float
    n_points: int
    grid: str

    def __str__(self):
        return (
            f"Linf={self.linf:.6e} L2={self.l2_abs:.6e} relL2={self.l2_rel:.6e} "
            f"({self.grid}, {self.n_points} points)"
        )


@dataclass(frozen=True)
class TestGrid:
    """Uniform tensor grid over the parameter cube."""

    axes: tuple[np.ndarray, ...]
    description: str

    @property
    def n_points(self) -> int:
        out = 1
        for a in self.axes:
            out *= len(a)
        return out

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=-1)


def test_grid(spec: ProblemSpec, cells_per_axis: int) -> TestGrid:
    """cells+1 points including endpoints on non-periodic axes; cells points,
    right-open, on periodic axes (the seam would duplicate)."""
    if cells_per_axis < 1:
        raise ValueError("cells_per_axis must be >= 1")
    axes = []
    for ax in spec.axes:
        if ax.family == "chebyshev_bc":
            axes.append(np.linspace(-1.0, 1.0, cells_per_axis + 1))
        else:
            axes.append(-1.0 + 2.0 * np.arange(cells_per_axis) / cells_per_axis)
    return TestGrid(
        axes=tuple(axes),
        description=f"uniform {cells_per_axis} cells/axis",
    )


def error_norms(spec: ProblemSpec, m: TensorModel, grid: TestGrid) -> ErrorReport:
    """Norms of (lifting + expansion) - exact over the grid."""
    if grid.n_points == 0:
        raise ValueError("empty test grid")
    points = grid.points()
    predicted = evaluate_on_grid(m, grid.axes).reshape(-1)
    predicted = predicted + spec.lifting.partial(points, (0,) * spec.dims, m.u0)
    exact = spec.exact_on_params(points)
    err = predicted - exact
    linf = float(np.max(np.abs(err)))
    l2_abs = float(np.sqrt(np.mean(err * err)))
    denom = float(np.sqrt(np.sum(exact * exact)))
    l2_rel = float(np.sqrt(np.sum(err * err)) / denom) if denom > 0 else float("inf")
    return ErrorReport(
        linf=linf, l2_abs=l2_abs, l2_rel=l2_rel,
        n_points=grid.n_points, grid=grid.description,
    )


@dataclass(frozen=True)
class OracleResult:
    model: TensorModel
    loss: float
    rank: int
    n_params: int
    errors: ErrorReport
    seconds: float


class NonlinearResidualError(ValueError):
    pass


def _superposition_probe(spec: ProblemSpec, families, rng) -> None:
    """Certify the residual is affine in parameters before solving linearly."""
    shape = tuple(f.size for f in families)
    pts = rng.uniform(-0.97, 0.97, size=(8, spec.dims))
    u0 = (0.0, 0.3) if spec.has_u0 else (None, None)

    def resid(weights, u0_val):
        m = TensorModel(families=families, weights=weights, u0=u0_val)
        return spec.residual_batch(m, pts)

    wa = rng.standard_normal(shape)
    wb = rng.standard_normal(shape)
    zero = np.zeros(shape)
    u0_sum = None if u0[0] is None else u0[0] + u0[1]
    gap = (
        resid(wa + wb, u0_sum)
        - resid(wa, u0[0])
        - resid(wb, u0[1])
        + resid(zero, 0.0 if spec.has_u0 else None)
    )
    if np.max(np.abs(gap)) > 1e-10 * max(1.0, np.max(np.abs(resid(wa, u0[0])))):
        raise NonlinearResidualError(
            f"residual of {spec.name} fails the superposition probe"
        )


def least_squares_oracle(
    spec: ProblemSpec,
    samples: SampleSet,
    sizes=None,
    families=None,
    cells: int | None = None,
) -> OracleResult:
    """Minimum-norm least-squares solution of the collocation system.

    Assembles residual = R theta - b (u0 as a trailing column when present)
    and solves via orthogonal factorization, not normal equations: collocation
    matrices grow ill-conditioned with order.
    """
    start = time.perf_counter()
    if families is None:
        if sizes is None:
            sizes = spec.default_sizes(spec.hyper.N)
        families = spec.build_families(sizes)
    _superposition_probe(spec, families, np.random.default_rng(12345))
    system = assemble_system(spec, families, samples)
    theta, _, rank, _ = scipy.linalg.lstsq(
        system.matrix, system.rhs, lapack_driver="gelsy"
    )
    if rank < system.n_params:
        warnings.warn(
            f"rank-deficient collocation system for {spec.name}: "
            f"effective rank {rank} of {system.n_params}",
            stacklevel=2,
        )
    r = system.residual_vec(theta)
    oracle_loss = float(r @ r / r.size)
    weights, u0 = system.unpack(theta)
    m = TensorModel(families=families, weights=weights, u0=u0)
    grid = test_grid(spec, cells if cells is not None else spec.hyper.cells)
    errors = error_norms(spec, m, grid)
    return OracleResult(
        model=m, loss=oracle_loss, rank=int(rank), n_params=system.n_params,
        errors=errors, seconds=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class SweepRow:
    N: int
    errors: ErrorReport
    final_loss: float
    seconds: float


def convergence_study(
    spec: ProblemSpec, N_list, cfg_template: TrainConfig
) -> list[SweepRow]:
    """Train once per order N and collect error norms; rows in N order."""
    N_list = [int(N) for N in N_list]
    if list(N_list) != sorted(set(N_list)):
        raise ValueError(f"N list must be strictly increasing, got {N_list}")
    rows = []
    for N in N_list:
        rc = resolve(with_order(cfg_template, N))
        model, report = train(spec, rc)
        grid = test_grid(spec, rc.cells)
        errors = error_norms(spec, model, grid)
        rows.append(
            SweepRow(N=N, errors=errors, final_loss=report.final_loss,
                     seconds=report.seconds)
        )
    return rows


def evaluate_run(spec: ProblemSpec, model: TensorModel, report: RunReport,
                 cells: int) -> RunReport:
    """Attach error norms on the standard grid to a training report."""
    report.errors = error_norms(spec, model, test_grid(spec, cells))
    return report


def grid_dump(spec: ProblemSpec, m: TensorModel, grid: TestGrid) -> str:
    """Flat CSV: parameter coords, physical coords, predicted, exact, error."""
    from .geometry import param_to_physical

    points = grid.points()
    predicted = evaluate_on_grid(m, grid.axes).reshape(-1)
    predicted = predicted + spec.lifting.partial(points, (0,) * spec.dims, m.u0)
    physical = param_to_physical(spec.dmap, points)
    exact = spec.exact_batch(physical)
    err = np.abs(predicted - exact)
    p_cols = [f"p{i}" for i in range(spec.dims)]
    q_cols = [f"x{i}" for i in range(physical.shape[1])]
    header = ",".join(p_cols + q_cols + ["predicted", "exact", "abs_error"])
    data = np.concatenate(
        [points, physical, predicted[:, None], exact[:, None], err[:, None]], axis=1
    )
    lines = [header]
    lines.extend(",".join("%.17g" % v for v in row) for row in data)
    return "\n".join(lines) + "\n"
