"""Chebyshev polynomials, their derivatives, and Gauss-Lobatto quadrature.

Everything here works on the reference interval [-1, 1].  Evaluation uses the
three-term recurrence T_{n+1} = 2x T_n - T_{n-1}; derivatives of order 1 and 2
use the differentiated recurrences, which are exact and O(n) per point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Round-off from coordinate maps may push points slightly outside [-1, 1].
DOMAIN_TOL = 1e-12


def _clamp(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + DOMAIN_TOL):
        bad = np.max(np.abs(x))
        raise ValueError(f"argument outside [-1, 1] beyond tolerance: |x| = {bad!r}")
    return np.clip(x, -1.0, 1.0)


def chebyshev_matrix(max_degree: int, x, order: int = 0) -> np.ndarray:
    """Values (or derivatives) of T_0 .. T_max_degree at the points x.

    Returns an array of shape (len(x), max_degree + 1); column n holds the
    order-th derivative of T_n.  Orders 0, 1, 2 are supported.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    if order not in (0, 1, 2):
        raise ValueError(f"unsupported derivative order {order}; only 0, 1, 2")
    x = np.atleast_1d(_clamp(x))
    n_pts = x.shape[0]
    m = max_degree + 1
    t = np.empty((n_pts, max(m, 2)))
    t[:, 0] = 1.0
    t[:, 1] = x
    for n in range(1, max(m, 2) - 1):
        t[:, n + 1] = 2.0 * x * t[:, n] - t[:, n - 1]
    if order == 0:
        return t[:, :m]

    d1 = np.empty_like(t)
    d1[:, 0] = 0.0
    d1[:, 1] = 1.0
    for n in range(1, d1.shape[1] - 1):
        # T'_{n+1} = 2 T_n + 2x T'_n - T'_{n-1}
        d1[:, n + 1] = 2.0 * t[:, n] + 2.0 * x * d1[:, n] - d1[:, n - 1]
    if order == 1:
        return d1[:, :m]

    d2 = np.empty_like(t)
    d2[:, 0] = 0.0
    d2[:, 1] = 0.0
    for n in range(1, d2.shape[1] - 1):
        # T''_{n+1} = 4 T'_n + 2x T''_n - T''_{n-1}
        d2[:, n + 1] = 4.0 * d1[:, n] + 2.0 * x * d2[:, n] - d2[:, n - 1]
    return d2[:, :m]


def eval_T(n: int, x) -> float | np.ndarray:
    """T_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    scalar = np.isscalar(x)
    vals = chebyshev_matrix(n, x, order=0)[:, n]
    return float(vals[0]) if scalar else vals


def eval_T_deriv(n: int, x, order: int = 1) -> float | np.ndarray:
    """Derivative of T_n at x, order 1 or 2."""
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    if order not in (1, 2):
        raise ValueError(f"unsupported derivative order {order}; only 1 and 2")
    scalar = np.isscalar(x)
    vals = chebyshev_matrix(n, x, order=order)[:, n]
    return float(vals[0]) if scalar else vals


@dataclass(frozen=True)
class CglRule:
    """Chebyshev-Gauss-Lobatto nodes cos(pi*j/N) (descending) and weights.

    Endpoint weights are pi/(2N), interior weights pi/N; they integrate
    against the Chebyshev weight 1/sqrt(1-x^2) exactly for degree <= 2N-1.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def interior_nodes(self) -> np.ndarray:
        """Nodes with the endpoints +-1 removed (j = 1 .. N-1)."""
        return self.nodes[1:-1]


def cgl_rule(N: int) -> CglRule:
    """Gauss-Lobatto rule of order N (N + 1 points)."""
    if N < 2:
        raise ValueError(f"quadrature order must be >= 2, got {N}")
    j = np.arange(N + 1)
    nodes = np.cos(np.pi * j / N)
    nodes[0] = 1.0
    nodes[N] = -1.0
    weights = np.full(N + 1, np.pi / N)
    weights[0] = weights[N] = np.pi / (2 * N)
    return CglRule(order=N, nodes=nodes, weights=weights)


def discrete_inner_product(u_values, v_values, rule: CglRule) -> float:
    """Sum of u(x_j) v(x_j) w_j over the rule's nodes."""
    u = np.asarray(u_values, dtype=float)
    v = np.asarray(v_values, dtype=float)
    n = rule.order + 1
    if u.shape != (n,) or v.shape != (n,):
        raise ValueError(
            f"value lists must have length {n} to match the rule, "
            f"got {u.shape} and {v.shape}"
        )
    return float(np.sum(u * v * rule.weights))


def discrete_norm(u_values, rule: CglRule) -> float:
    """Norm induced by the discrete inner product."""
    return float(np.sqrt(discrete_inner_product(u_values, u_values, rule)))
