"""Benchmark catalog: residual operators, forcings, exact solutions, liftings.

Each benchmark bundles a parameter-space residual operator written as a sum
of coefficient * mixed-partial terms, a forcing derived analytically from the
exact solution (method of manufactured solutions, in physical coordinates),
the exact solution with closed-form gradient/Hessian, a boundary lifting, and
default hyperparameters.  Because forcing and operator are derived
independently (physical vs. parameter space), the residual of the exact
solution vanishing is a genuine check of the coordinate-transform algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import basis as basis_mod
from .basis import BoundaryCondition
from .geometry import (
    DomainMap,
    annulus_map,
    cylinder_shell_map,
    disk_map,
    identity_map,
    param_to_physical,
)
from .liftings import (
    CenterValueLifting,
    Lifting,
    MappedField,
    PolynomialLifting,
    SmoothFunction,
    TransfiniteLifting,
    ZeroLifting,
)
from .model import TensorModel, partial_batch

PI = math.pi

# An operator term is (multi-index, coefficient field); the residual is
#   sum_j coeff_j(p) * d^idx_j(trial)(p) - forcing(p).
OperatorTerms = list[tuple[tuple[int, ...], np.ndarray]]


@dataclass(frozen=True)
class AxisSpec:
    family: str  # chebyshev_bc | fourier
    bc: BoundaryCondition


@dataclass(frozen=True)
class Hyper:
    """Per-problem default hyperparameters (all overridable in configs)."""

    N: int
    lr: float
    factor: float
    patience: int
    iterations: int = 0  # 0: use iterations_per_N * N
    iterations_per_N: int = 0
    fourier_samples: int = 0
    fourier_size: int = 0  # 0: use the 2N-3 span rule
    cells: int = 300
    sweep: tuple[int, ...] = ()
    # Output scale of the expansion during optimization: Adam's per-step
    # travel is bounded by lr, so problems whose expansion coefficients are
    # large (huge boundary data) optimize in units of this scale.
    output_scale: float = 1.0
    u0_lr: float = 0.06
    u0_factor: float = 0.8
    u0_patience: int = 600
    correction_threshold: int = 1000
    correction_interval: int = 100
    correction_h: float = 1e-3


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    description: str
    dmap: DomainMap
    axes: tuple[AxisSpec, ...]
    operator: Callable[[np.ndarray], OperatorTerms]
    forcing: Callable[[np.ndarray], np.ndarray]
    exact: SmoothFunction
    lifting: Lifting
    hyper: Hyper
    has_u0: bool = False

    @property
    def dims(self) -> int:
        return len(self.axes)

    # ---- sizing rules -------------------------------------------------
    def default_sizes(self, N: int) -> tuple[int, ...]:
        """Family sizes for order N: N-1 boundary-satisfying Chebyshev
        combinations per non-periodic axis; constant + cos/sin pairs up to
        frequency N-2 (2N-3 functions) per periodic axis."""
        sizes = []
        for ax in self.axes:
            if ax.family == "chebyshev_bc":
                sizes.append(N - 1)
            else:
                sizes.append(self.hyper.fourier_size or 2 * N - 3)
        return tuple(sizes)

    def default_samples(self, N: int) -> tuple[int, ...]:
        """Per-axis sampling: CGL order (N-1 interior nodes) on Chebyshev
        axes, uniform count on periodic axes."""
        counts = []
        for ax in self.axes:
            if ax.family == "chebyshev_bc":
                counts.append(N)
            else:
                counts.append(self.hyper.fourier_samples)
        return tuple(counts)

    def default_iterations(self, N: int) -> int:
        h = self.hyper
        return h.iterations if h.iterations else h.iterations_per_N * N

    def build_families(self, sizes) -> tuple:
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) != self.dims:
            raise ValueError(f"expected {self.dims} sizes, got {len(sizes)}")
        return tuple(
            basis_mod.build_family(ax.family, s, ax.bc)
            for ax, s in zip(self.axes, sizes)
        )

    # ---- evaluation ---------------------------------------------------
    def forcing_batch(self, points: np.ndarray) -> np.ndarray:
        return self.forcing(np.atleast_2d(np.asarray(points, dtype=float)))

    def lifting_partial(self, points, idx, u0=None) -> np.ndarray:
        return self.lifting.partial(points, idx, u0)

    def residual_batch(self, m: TensorModel, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.has_u0 and m.u0 is None:
            raise ValueError(f"problem {self.name} requires a model with u0")
        out = -self.forcing_batch(points)
        for idx, coeff in self.operator(points):
            du = partial_batch(m, points, idx)
            du = du + self.lifting.partial(points, idx, m.u0)
            out = out + coeff * du
        return out

    def exact_residual_batch(self, points: np.ndarray) -> np.ndarray:
        """Residual with the exact solution substituted for the trial.

        Should vanish identically; a nonzero value exposes an error in the
        transformed operator, the forcing, or the chain-rule machinery.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        mapped = MappedField(self.exact, self.dmap)
        out = -self.forcing_batch(points)
        for idx, coeff in self.operator(points):
            out = out + coeff * mapped.partial(points, idx)
        return out

    def trial_batch(self, m: TensorModel, points: np.ndarray) -> np.ndarray:
        """lifting + expansion at a batch of parameter points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        zero = (0,) * self.dims
        return self.lifting.partial(points, zero, m.u0) + partial_batch(m, points, zero)

    def exact_batch(self, q: np.ndarray) -> np.ndarray:
        return self.exact.value(np.atleast_2d(np.asarray(q, dtype=float)))

    def exact_on_params(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.exact_batch(param_to_physical(self.dmap, points))


# ---------------------------------------------------------------------------
# module-level operation wrappers (single-point convenience over the batches)
# ---------------------------------------------------------------------------


def residual(spec: ProblemSpec, m: TensorModel, p) -> float:
    """PDE operator applied to (lifting + expansion) minus forcing at p."""
    return float(spec.residual_batch(m, np.asarray(p, dtype=float).reshape(1, -1))[0])


def lifting_value(spec: ProblemSpec, p, u0: float | None = None) -> float:
    p = np.asarray(p, dtype=float).reshape(1, -1)
    return float(spec.lifting.partial(p, (0,) * spec.dims, u0)[0])


def exact_solution(spec: ProblemSpec, q) -> float:
    return float(spec.exact_batch(np.asarray(q, dtype=float).reshape(1, -1))[0])


# ---------------------------------------------------------------------------
# exact solutions (value / gradient / Hessian in physical coordinates)
# ---------------------------------------------------------------------------


def _exact_robin1d() -> SmoothFunction:
    # u(x) = e^(5x) + sin(x^2)
    def value(q):
        x = q[:, 0]
        return np.exp(5 * x) + np.sin(x * x)

    def grad(q):
        x = q[:, 0]
        return (5 * np.exp(5 * x) + 2 * x * np.cos(x * x))[:, None]

    def hess(q):
        x = q[:, 0]
        h = 25 * np.exp(5 * x) + 2 * np.cos(x * x) - 4 * x * x * np.sin(x * x)
        return h[:, None, None]

    return SmoothFunction(1, value, grad, hess)


def _exact_rect2d() -> SmoothFunction:
    # u(x, y) = e^(-x) sin(pi y)
    def value(q):
        return np.exp(-q[:, 0]) * np.sin(PI * q[:, 1])

    def grad(q):
        e, s, c = np.exp(-q[:, 0]), np.sin(PI * q[:, 1]), np.cos(PI * q[:, 1])
        return np.stack([-e * s, PI * e * c], axis=-1)

    def hess(q):
        e, s, c = np.exp(-q[:, 0]), np.sin(PI * q[:, 1]), np.cos(PI * q[:, 1])
        h = np.empty((q.shape[0], 2, 2))
        h[:, 0, 0] = e * s
        h[:, 0, 1] = h[:, 1, 0] = -PI * e * c
        h[:, 1, 1] = -PI * PI * e * s
        return h

    return SmoothFunction(2, value, grad, hess)


def _exact_exp_cos2d() -> SmoothFunction:
    # u(x, y) = e^x cos(pi y)
    def value(q):
        return np.exp(q[:, 0]) * np.cos(PI * q[:, 1])

    def grad(q):
        e, s, c = np.exp(q[:, 0]), np.sin(PI * q[:, 1]), np.cos(PI * q[:, 1])
        return np.stack([e * c, -PI * e * s], axis=-1)

    def hess(q):
        e, s, c = np.exp(q[:, 0]), np.sin(PI * q[:, 1]), np.cos(PI * q[:, 1])
        h = np.empty((q.shape[0], 2, 2))
        h[:, 0, 0] = e * c
        h[:, 0, 1] = h[:, 1, 0] = -PI * e * s
        h[:, 1, 1] = -PI * PI * e * c
        return h

    return SmoothFunction(2, value, grad, hess)


def _exact_exp_sin2d() -> SmoothFunction:
    # u(x, y) = e^x sin(pi y)
    def value(q):
        return np.exp(q[:, 0]) * np.sin(PI * q[:, 1])

    def grad(q):
        e, s, c = np.exp(q[:, 0]), np.sin(PI * q[:, 1]), np.cos(PI * q[:, 1])
        return np.stack([e * s, PI * e * c], axis=-1)

    def hess(q):
        e, s, c = np.exp(q[:, 0]), np.sin(PI * q[:, 1]), np.cos(PI * q[:, 1])
        h = np.empty((q.shape[0], 2, 2))
        h[:, 0, 0] = e * s
        h[:, 0, 1] = h[:, 1, 0] = PI * e * c
        h[:, 1, 1] = -PI * PI * e * s
        return h

    return SmoothFunction(2, value, grad, hess)


_CYL_EXPONENT = np.array([2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0])


def _exact_cyl3d() -> SmoothFunction:
    # u = exp((2x + 2y + z)/3) sin(pi (x + y + z))
    a = _CYL_EXPONENT

    def parts(q):
        w = q.sum(axis=1)
        return np.exp(q @ a), np.sin(PI * w), np.cos(PI * w)

    def value(q):
        e, s, _ = parts(q)
        return e * s

    def grad(q):
        e, s, c = parts(q)
        return a[None, :] * (e * s)[:, None] + PI * (e * c)[:, None]

    def hess(q):
        e, s, c = parts(q)
        aa = np.multiply.outer(a, a)
        asum = a[:, None] + a[None, :]
        return (
            (aa[None] - PI * PI) * (e * s)[:, None, None]
            + asum[None] * PI * (e * c)[:, None, None]
        )

    return SmoothFunction(3, value, grad, hess)


def _exact_sines4d() -> SmoothFunction:
    # u = prod_i sin(pi x_i)
    def value(q):
        return np.prod(np.sin(PI * q), axis=1)

    def grad(q):
        s, c = np.sin(PI * q), np.cos(PI * q)
        g = np.empty_like(q)
        for i in range(q.shape[1]):
            others = np.prod(np.delete(s, i, axis=1), axis=1)
            g[:, i] = PI * c[:, i] * others
        return g

    def hess(q):
        s, c = np.sin(PI * q), np.cos(PI * q)
        n, d = q.shape
        h = np.empty((n, d, d))
        for i in range(d):
            for j in range(i, d):
                keep = [k for k in range(d) if k not in (i, j)]
                others = np.prod(s[:, keep], axis=1) if keep else np.ones(n)
                if i == j:
                    h[:, i, i] = -PI * PI * s[:, i] * others
                else:
                    h[:, i, j] = h[:, j, i] = PI * PI * c[:, i] * c[:, j] * others
        return h

    return SmoothFunction(4, value, grad, hess)


# ---------------------------------------------------------------------------
# benchmark constructors
# ---------------------------------------------------------------------------


def _robin1d() -> ProblemSpec:
    s1, c1 = math.sin(1.0), math.cos(1.0)
    data = basis_mod.robin(
        1.0, -1.0, -4.0 * math.exp(-5.0) + s1 + 2.0 * c1,
        1.0, 1.0, 6.0 * math.exp(5.0) + s1 + 2.0 * c1,
    )
    hom = basis_mod.robin(1.0, -1.0, 0.0, 1.0, 1.0, 0.0)
    lifting = PolynomialLifting(basis_mod.homogenize(data))

    def operator(points):
        x = points[:, 0]
        ones = np.ones_like(x)
        return [((2,), ones), ((1,), x), ((0,), -ones)]

    def forcing(points):
        # u'' + x u' - u applied to the exact solution, expanded by hand
        x = points[:, 0]
        e, s, c = np.exp(5 * x), np.sin(x * x), np.cos(x * x)
        return (24 + 5 * x) * e + (2 + 2 * x * x) * c - (4 * x * x + 1) * s

    return ProblemSpec(
        name="robin1d",
        description="1D Robin two-point problem u'' + x u' - u = f, u = e^(5x) + sin(x^2)",
        dmap=identity_map(1),
        axes=(AxisSpec("chebyshev_bc", hom),),
        operator=operator,
        forcing=forcing,
        exact=_exact_robin1d(),
        lifting=lifting,
        hyper=Hyper(N=14, lr=0.1, factor=0.7, patience=600, iterations_per_N=300,
                    cells=500, sweep=(6, 8, 10, 12, 14), output_scale=512.0),
    )


def _poisson2d_rect() -> ProblemSpec:
    exact = _exact_rect2d()
    dmap = identity_map(2)

    def operator(points):
        ones = np.ones(points.shape[0])
        return [((2, 0), -ones), ((0, 2), -ones)]

    def forcing(points):
        # -Laplacian of e^(-x) sin(pi y)
        return (PI * PI - 1.0) * np.exp(-points[:, 0]) * np.sin(PI * points[:, 1])

    return ProblemSpec(
        name="poisson2d_rect",
        description="2D Poisson -Lap u = f on [-1,1]^2, u = e^(-x) sin(pi y)",
        dmap=dmap,
        axes=(AxisSpec("chebyshev_bc", basis_mod.dirichlet()),
              AxisSpec("chebyshev_bc", basis_mod.dirichlet())),
        operator=operator,
        forcing=forcing,
        exact=exact,
        lifting=TransfiniteLifting(MappedField(exact, dmap), blended_axes=(0, 1)),
        hyper=Hyper(N=10, lr=0.1, factor=0.7, patience=600, iterations=2000,
                    cells=300, sweep=(6, 8, 10)),
    )


def _annulus_operator(dmap: DomainMap, sign: float):
    """sign * Laplacian in stretched polar coordinates (s radial, t angular)."""
    a = 2.0 / (dmap.f2 - dmap.f1)  # ds/dr

    def operator(points):
        s = points[:, 0]
        r = dmap.radius(s)
        ones = np.ones_like(s)
        return [
            ((2, 0), sign * a * a * ones),
            ((1, 0), sign * a / r),
            ((0, 2), sign / (PI * PI * r * r)),
        ]

    return operator


def _poisson2d_annulus() -> ProblemSpec:
    exact = _exact_exp_cos2d()
    dmap = annulus_map(0.5, 1.0)

    def forcing(points):
        q = param_to_physical(dmap, points)
        return (PI * PI - 1.0) * np.exp(q[:, 0]) * np.cos(PI * q[:, 1])

    return ProblemSpec(
        name="poisson2d_annulus",
        description="2D Poisson on the annulus 0.5 <= r <= 1, u = e^x cos(pi y)",
        dmap=dmap,
        axes=(AxisSpec("chebyshev_bc", basis_mod.dirichlet()),
              AxisSpec("fourier", basis_mod.periodic())),
        operator=_annulus_operator(dmap, -1.0),
        forcing=forcing,
        exact=exact,
        lifting=TransfiniteLifting(MappedField(exact, dmap), blended_axes=(0,)),
        hyper=Hyper(N=10, lr=0.01, factor=0.6, patience=500, iterations=2000,
                    fourier_samples=500, cells=300, sweep=(6, 8, 10)),
    )


def _helmholtz2d_annulus() -> ProblemSpec:
    exact = _exact_exp_sin2d()
    dmap = annulus_map(0.5, 1.0)
    lap = _annulus_operator(dmap, 1.0)

    def operator(points):
        terms = lap(points)
        terms.append(((0, 0), np.ones(points.shape[0])))
        return terms

    def forcing(points):
        q = param_to_physical(dmap, points)
        return (2.0 - PI * PI) * np.exp(q[:, 0]) * np.sin(PI * q[:, 1])

    return ProblemSpec(
        name="helmholtz2d_annulus",
        description="2D Helmholtz Lap u + u = f on the annulus, u = e^x sin(pi y)",
        dmap=dmap,
        axes=(AxisSpec("chebyshev_bc", basis_mod.dirichlet()),
              AxisSpec("fourier", basis_mod.periodic())),
        operator=operator,
        forcing=forcing,
        exact=exact,
        lifting=TransfiniteLifting(MappedField(exact, dmap), blended_axes=(0,)),
        hyper=Hyper(N=13, lr=0.01, factor=0.6, patience=500, iterations=2000,
                    fourier_samples=500, cells=300, sweep=(9, 11, 13)),
    )


def _poisson2d_disk() -> ProblemSpec:
    exact = _exact_exp_cos2d()
    dmap = disk_map(1.0)

    def forcing(points):
        q = param_to_physical(dmap, points)
        return (PI * PI - 1.0) * np.exp(q[:, 0]) * np.cos(PI * q[:, 1])

    return ProblemSpec(
        name="poisson2d_disk",
        description="2D Poisson on the unit disk with trainable center value",
        dmap=dmap,
        axes=(AxisSpec("chebyshev_bc", basis_mod.dirichlet()),
              AxisSpec("fourier", basis_mod.periodic())),
        operator=_annulus_operator(dmap, -1.0),
        forcing=forcing,
        exact=exact,
        lifting=CenterValueLifting(MappedField(exact, dmap)),
        hyper=Hyper(N=10, lr=8e-3, factor=0.7, patience=800, iterations=10000,
                    fourier_samples=500, cells=300,
                    u0_lr=6e-2, u0_factor=0.8, u0_patience=600,
                    correction_threshold=1000, correction_interval=100,
                    correction_h=5e-2),
        has_u0=True,
    )


def _elliptic3d_cyl() -> ProblemSpec:
    exact = _exact_cyl3d()
    dmap = cylinder_shell_map(0.5, 1.0)
    a = 2.0 / (dmap.f2 - dmap.f1)

    def sigma_parts(q):
        w = q.sum(axis=1)
        return np.cos(PI * w) + 2.0, -PI * np.sin(PI * w)  # sigma, d sigma/d each

    def operator(points):
        s, t = points[:, 0], points[:, 1]
        r = dmap.radius(s)
        th = dmap.angle(t)
        q = param_to_physical(dmap, points)
        sigma, dsig = sigma_parts(q)
        kappa = np.sin(PI * q.sum(axis=1)) + 2.0
        cth, sth = np.cos(th), np.sin(th)
        sig_r = dsig * (cth + sth)
        return [
            ((2, 0, 0), sigma * a * a),
            ((1, 0, 0), (sigma / r + sig_r) * a),
            ((0, 2, 0), sigma / (PI * PI * r * r)),
            ((0, 1, 0), dsig * (cth - sth) / (PI * r)),
            ((0, 0, 2), sigma),
            ((0, 0, 1), dsig),
            ((0, 0, 0), -kappa),
        ]

    def forcing(points):
        # div(sigma grad u) - kappa u for the exact solution, in Cartesian form
        q = param_to_physical(dmap, points)
        w = q.sum(axis=1)
        e = np.exp(q @ _CYL_EXPONENT)
        s, c = np.sin(PI * w), np.cos(PI * w)
        sigma = c + 2.0
        kappa = s + 2.0
        lap_u = (1.0 - 3.0 * PI * PI) * e * s + (10.0 / 3.0) * PI * e * c
        grad_dot = -PI * s * ((5.0 / 3.0) * e * s + 3.0 * PI * e * c)
        return sigma * lap_u + grad_dot - kappa * e * s

    return ProblemSpec(
        name="elliptic3d_cyl",
        description="3D variable-coefficient elliptic PDE on a cylindrical shell",
        dmap=dmap,
        axes=(AxisSpec("chebyshev_bc", basis_mod.dirichlet()),
              AxisSpec("fourier", basis_mod.periodic()),
              AxisSpec("chebyshev_bc", basis_mod.dirichlet())),
        operator=operator,
        forcing=forcing,
        exact=exact,
        lifting=TransfiniteLifting(MappedField(exact, dmap), blended_axes=(0, 2)),
        hyper=Hyper(N=8, lr=0.01, factor=0.7, patience=100, iterations=500,
                    fourier_samples=100, fourier_size=31, cells=32),
    )


def _poisson4d() -> ProblemSpec:
    exact = _exact_sines4d()

    def operator(points):
        ones = np.ones(points.shape[0])
        return [((2, 0, 0, 0), -ones), ((0, 2, 0, 0), -ones),
                ((0, 0, 2, 0), -ones), ((0, 0, 0, 2), -ones)]

    def forcing(points):
        return 4.0 * PI * PI * np.prod(np.sin(PI * points), axis=1)

    return ProblemSpec(
        name="poisson4d",
        description="4D Poisson -Lap u = f on [-1,1]^4, u = prod sin(pi x_i)",
        dmap=identity_map(4),
        axes=tuple(AxisSpec("chebyshev_bc", basis_mod.dirichlet()) for _ in range(4)),
        operator=operator,
        forcing=forcing,
        exact=exact,
        lifting=ZeroLifting(),
        hyper=Hyper(N=10, lr=0.1, factor=0.7, patience=600, iterations=1000,
                    cells=11, sweep=(6, 8, 10)),
    )


_BUILDERS = {
    "robin1d": _robin1d,
    "poisson2d_rect": _poisson2d_rect,
    "poisson2d_annulus": _poisson2d_annulus,
    "helmholtz2d_annulus": _helmholtz2d_annulus,
    "poisson2d_disk": _poisson2d_disk,
    "elliptic3d_cyl": _elliptic3d_cyl,
    "poisson4d": _poisson4d,
}

PROBLEM_NAMES = tuple(_BUILDERS)
_CACHE: dict[str, ProblemSpec] = {}


def catalog(name: str) -> ProblemSpec:
    """Look up a benchmark by name."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; valid names: {', '.join(PROBLEM_NAMES)}"
        ) from None
    if name not in _CACHE:
        _CACHE[name] = builder()
    return _CACHE[name]
