"""Tensor-product expansion over per-dimension basis families.

The trainable object is a dense weight tensor W over the product of the
per-axis families, evaluated as

    u(x) = sum_{i1..id} W[i1..id] * phi_{i1}(x_1) * ... * phi_{id}(x_d),

optionally plus a scalar trainable center value u0 carried alongside for
domains whose inner face has no prescribed data.  Everything is linear in
(W, u0), so input derivatives and weight gradients have exact product forms;
no automatic differentiation is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import basis as basis_mod
from .basis import BasisFamily, BoundaryCondition


@dataclass(frozen=True)
class TensorModel:
    families: tuple[BasisFamily, ...]
    weights: np.ndarray
    u0: float | None = None

    def __post_init__(self):
        sizes = tuple(f.size for f in self.families)
        if self.weights.shape != sizes:
            raise ValueError(
                f"weight tensor shape {self.weights.shape} does not match "
                f"family sizes {sizes}"
            )

    @property
    def dims(self) -> int:
        return len(self.families)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.weights.shape

    @property
    def n_weights(self) -> int:
        return int(self.weights.size)

    def with_weights(self, weights: np.ndarray, u0: float | None = None) -> "TensorModel":
        return replace(self, weights=weights, u0=self.u0 if u0 is None else u0)


def zero_model(families, u0: float | None = None) -> TensorModel:
    families = tuple(families)
    shape = tuple(f.size for f in families)
    return TensorModel(families=families, weights=np.zeros(shape), u0=u0)


def _check_index(m: TensorModel, idx) -> tuple[int, ...]:
    idx = tuple(int(i) for i in idx)
    if len(idx) != m.dims:
        raise ValueError(f"multi-index length {len(idx)} does not match dims {m.dims}")
    if any(i < 0 or i > 2 for i in idx):
        raise ValueError(f"per-axis derivative orders must be in 0..2, got {idx}")
    return idx


def basis_matrices(m: TensorModel, points: np.ndarray, idx) -> list[np.ndarray]:
    """Per-axis member-derivative matrices at a batch of points (n, dims)."""
    idx = _check_index(m, idx)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != m.dims:
        raise ValueError(f"points have dimension {points.shape[1]}, model has {m.dims}")
    return [
        fam.value_matrix(points[:, axis], order=idx[axis])
        for axis, fam in enumerate(m.families)
    ]


_EINSUM_LETTERS = "abcd"


def partial_batch(m: TensorModel, points: np.ndarray, idx) -> np.ndarray:
    """Mixed partial of the expansion at each of a batch of points."""
    mats = basis_matrices(m, points, idx)
    operands = []
    subs = []
    for axis, mat in enumerate(mats):
        operands.append(mat)
        subs.append("n" + _EINSUM_LETTERS[axis])
    spec = ",".join(subs) + "," + _EINSUM_LETTERS[: m.dims] + "->n"
    return np.einsum(spec, *operands, m.weights, optimize=True)


def evaluate_batch(m: TensorModel, points: np.ndarray) -> np.ndarray:
    return partial_batch(m, points, (0,) * m.dims)


def evaluate(m: TensorModel, x) -> float:
    """Expansion value at a single point."""
    return partial(m, x, (0,) * m.dims)


def partial(m: TensorModel, x, idx) -> float:
    """Exact mixed partial at a single point (per-axis order <= 2)."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(partial_batch(m, x, idx)[0])


def weight_gradient(m: TensorModel, x, idx) -> np.ndarray:
    """Gradient of partial(m, x, idx) with respect to the weight tensor.

    Independent of the current weights: entry [i1..id] is the product of the
    per-axis member derivatives at x.
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    mats = basis_matrices(m, x, idx)
    grad = mats[0][0]
    for mat in mats[1:]:
        grad = np.multiply.outer(grad, mat[0])
    return grad


def evaluate_on_grid(m: TensorModel, axes, idx=None) -> np.ndarray:
    """Expansion (or a mixed partial) on a tensor-product grid.

    axes is a sequence of 1D arrays of per-axis points; the result has shape
    (len(axes[0]), ..., len(axes[-1])).  Much faster than looping over the
    product when grids are large.
    """
    if idx is None:
        idx = (0,) * m.dims
    idx = _check_index(m, idx)
    if len(axes) != m.dims:
        raise ValueError(f"expected {m.dims} axis arrays, got {len(axes)}")
    out = m.weights
    # Contract one axis at a time: result index order stays (axis0, axis1, ...).
    for axis, fam in enumerate(m.families):
        mat = fam.value_matrix(np.asarray(axes[axis], dtype=float), order=idx[axis])
        out = np.tensordot(mat, out, axes=(1, axis))
        out = np.moveaxis(out, 0, axis)
    return out


# ---------------------------------------------------------------------------
# Checkpoint format: flat UTF-8 text, one token group per line.
#
#   csnn-checkpoint 1
#   problem <name or ->
#   dims <d>
#   axis <i> <kind> <size> <bc-kind> <a-> <b-> <c-> <a+> <b+> <c+>
#   u0 <value or none>
#   weights <count>
#   <count lines of %.17g, row-major>
# ---------------------------------------------------------------------------

_FMT = "%.17g"


def save_checkpoint(m: TensorModel, path, problem: str | None = None) -> None:
    lines = ["csnn-checkpoint 1", f"problem {problem or '-'}", f"dims {m.dims}"]
    for i, fam in enumerate(m.families):
        bc = fam.bc
        coeffs = " ".join(
            _FMT % v
            for v in (bc.a_minus, bc.b_minus, bc.c_minus, bc.a_plus, bc.b_plus, bc.c_plus)
        )
        lines.append(f"axis {i} {fam.kind} {fam.size} {bc.kind} {coeffs}")
    lines.append("u0 none" if m.u0 is None else "u0 " + _FMT % m.u0)
    flat = m.weights.reshape(-1)
    lines.append(f"weights {flat.size}")
    lines.extend(_FMT % v for v in flat)
    Path(path).write_text("\n".join(lines) + "\n")


def load_checkpoint(path) -> tuple[TensorModel, str | None]:
    lines = Path(path).read_text().splitlines()
    it = iter(lines)

    def take(prefix: str) -> list[str]:
        line = next(it).split()
        if not line or line[0] != prefix:
            raise ValueError(f"malformed checkpoint: expected {prefix!r}, got {line!r}")
        return line[1:]

    header = take("csnn-checkpoint")
    if header != ["1"]:
        raise ValueError(f"unsupported checkpoint version {header!r}")
    problem = take("problem")[0]
    problem = None if problem == "-" else problem
    dims = int(take("dims")[0])
    families = []
    for i in range(dims):
        tok = take("axis")
        if int(tok[0]) != i:
            raise ValueError(f"axis lines out of order at {tok!r}")
        kind, size, bc_kind = tok[1], int(tok[2]), tok[3]
        am, bm, cm, ap, bp, cp = (float(v) for v in tok[4:10])
        bc = BoundaryCondition(bc_kind, am, bm, cm, ap, bp, cp)
        families.append(basis_mod.build_family(kind, size, bc))
    u0_tok = take("u0")[0]
    u0 = None if u0_tok == "none" else float(u0_tok)
    count = int(take("weights")[0])
    flat = np.array([float(next(it)) for _ in range(count)])
    shape = tuple(f.size for f in families)
    if flat.size != int(np.prod(shape)):
        raise ValueError("weight count does not match family sizes")
    model = TensorModel(
        families=tuple(families), weights=flat.reshape(shape), u0=u0
    )
    return model, problem
