"""Boundary liftings: smooth functions matching prescribed boundary data.

A trial solution is lifting + expansion, with the expansion vanishing on the
non-periodic faces, so the lifting alone carries the boundary data.  Three
constructions cover all benchmarks:

* a degree-<=2 polynomial shift for 1D two-point data (``PolynomialLifting``),
* transfinite (boolean-sum) blending of exact face traces for rectangles and
  mapped shells (``TransfiniteLifting``),
* the center-value blend for disks, where the inner face carries a single
  trainable scalar u0 instead of prescribed data (``CenterValueLifting``).

All liftings evaluate closed-form mixed partials (per-axis order <= 2, total
order <= 2) so residual operators can be applied to them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import LiftingPolynomial
from .geometry import DomainMap, map_jacobian, map_second_derivs, param_to_physical


@dataclass(frozen=True)
class SmoothFunction:
    """Closed-form scalar field with gradient and Hessian, vectorized over
    point batches of shape (n, dim)."""

    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]


class MappedField:
    """A smooth physical-space field composed with a domain map.

    Provides mixed parameter-space partials up to total order 2 via the chain
    rule, using the map's closed-form Jacobian and second derivatives.
    """

    def __init__(self, field: SmoothFunction, dmap: DomainMap):
        self.field = field
        self.dmap = dmap

    def partial(self, points: np.ndarray, idx) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = tuple(int(i) for i in idx)
        total = sum(idx)
        q = param_to_physical(self.dmap, points)
        if total == 0:
            return self.field.value(q)
        if total > 2:
            raise ValueError(
                f"mapped-field partials support total order <= 2, got {idx}"
            )
        axes = [i for i, o in enumerate(idx) for _ in range(o)]
        jac = map_jacobian(self.dmap, points)
        g = self.field.grad(q)
        if total == 1:
            (i,) = axes
            return np.einsum("na,na->n", g, jac[:, :, i])
        i, j = axes
        hess = self.field.hess(q)
        sec = map_second_derivs(self.dmap, points)
        first = np.einsum("nab,na,nb->n", hess, jac[:, :, i], jac[:, :, j])
        second = np.einsum("na,na->n", g, sec[:, :, i, j])
        return first + second


def _blend(e: int, x: np.ndarray, order: int) -> np.ndarray:
    """Linear blend weight that is 1 at endpoint e in {-1, +1}, 0 at -e."""
    if order == 0:
        return 0.5 * (1.0 + e * x)
    if order == 1:
        return np.full_like(x, 0.5 * e)
    return np.zeros_like(x)


class Lifting:
    """Interface: closed-form partials, affine in the optional scalar u0."""

    def partial(self, points, idx, u0: float | None = None) -> np.ndarray:
        raise NotImplementedError

    def u0_sens(self, points, idx) -> np.ndarray:
        """Derivative of partial(...) with respect to u0 (zero by default)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.zeros(points.shape[0])

    def value(self, points, u0: float | None = None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.partial(points, (0,) * points.shape[1], u0)


class ZeroLifting(Lifting):
    def partial(self, points, idx, u0=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.zeros(points.shape[0])


class PolynomialLifting(Lifting):
    """1D two-point lifting u_bar = beta x^2 + gamma x or beta x + gamma."""

    def __init__(self, poly: LiftingPolynomial):
        self.poly = poly

    def partial(self, points, idx, u0=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        x = points[:, 0]
        (order,) = tuple(idx)
        if order == 0:
            return np.asarray(self.poly(x), dtype=float)
        return self.poly.deriv(x, order=order)


class TransfiniteLifting(Lifting):
    """Boolean-sum blend of exact face traces over the blended axes.

    With face projectors P_a u = sum_e blend_e(p_a) * u|_{p_a = e}, the lifting
    is the boolean sum (P_1 (+) P_2 (+) ...) applied to the mapped exact field:
    it matches the field on every blended face, and on a rectangle with two
    blended axes reduces to the classic two-direction corner-corrected blend.
    """

    def __init__(self, mapped: MappedField, blended_axes: tuple[int, ...]):
        self.mapped = mapped
        self.blended_axes = tuple(blended_axes)
        terms = []  # (sign, ((axis, endpoint), ...)) inclusion-exclusion terms
        m = len(self.blended_axes)
        for mask in range(1, 1 << m):
            axes = [self.blended_axes[i] for i in range(m) if mask >> i & 1]
            sign = -1.0 if len(axes) % 2 == 0 else 1.0
            corners = [()]
            for a in axes:
                corners = [c + ((a, e),) for c in corners for e in (-1, 1)]
            terms.extend((sign, corner) for corner in corners)
        self._terms = terms

    def partial(self, points, idx, u0=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = tuple(int(i) for i in idx)
        out = np.zeros(points.shape[0])
        for sign, corner in self._terms:
            pinned_axes = {a for a, _ in corner}
            # Blend factors absorb the derivative orders on pinned axes;
            # quadratic-or-higher orders kill the (linear) blend.
            if any(idx[a] > 1 for a in pinned_axes):
                continue
            coeff = np.full(points.shape[0], sign)
            for a, e in corner:
                coeff = coeff * _blend(e, points[:, a], idx[a])
            pinned = points.copy()
            for a, e in corner:
                pinned[:, a] = float(e)
            trace_idx = tuple(0 if a in pinned_axes else o for a, o in enumerate(idx))
            out += coeff * self.mapped.partial(pinned, trace_idx)
        return out


class CenterValueLifting(Lifting):
    """Disk lifting (1-z)/2 * u0 + (1+z)/2 * g(t) with g the outer trace.

    The z = -1 face of the stretched disk is the center point; its value is
    the trainable scalar u0 rather than prescribed data.
    """

    def __init__(self, mapped: MappedField, radial_axis: int = 0):
        self.mapped = mapped
        self.radial_axis = radial_axis

    def _require_u0(self, u0):
        if u0 is None:
            raise ValueError("this lifting requires the center value u0")
        return float(u0)

    def partial(self, points, idx, u0=None):
        u0 = self._require_u0(u0)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = tuple(int(i) for i in idx)
        out = u0 * self.u0_sens(points, idx)
        a = self.radial_axis
        if idx[a] <= 1:
            coeff = _blend(+1, points[:, a], idx[a])
            pinned = points.copy()
            pinned[:, a] = 1.0
            trace_idx = tuple(0 if i == a else o for i, o in enumerate(idx))
            out = out + coeff * self.mapped.partial(pinned, trace_idx)
        return out

    def u0_sens(self, points, idx):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = tuple(int(i) for i in idx)
        a = self.radial_axis
        if any(o != 0 for i, o in enumerate(idx) if i != a) or idx[a] > 1:
            return np.zeros(points.shape[0])
        return _blend(-1, points[:, a], idx[a])
