"""One-dimensional basis families that satisfy homogeneous boundary conditions.

Two family kinds are supported:

* ``chebyshev_bc`` -- combinations phi_k = T_k + a_k T_{k+1} + b_k T_{k+2}
  whose coefficients are solved from the two-point boundary operator
  a u(+-1) + b u'(+-1) = 0.  Homogeneous Dirichlet reduces to the classic
  stencil T_k - T_{k+2}.
* ``fourier`` -- the trigonometric span {1, cos(pi t), sin(pi t),
  cos(2 pi t), ...} on t in [-1, 1] for periodic directions.  Periodic
  members are entire, so they accept any real argument.

Non-homogeneous two-point data is shifted away with a low-degree lifting
polynomial (``homogenize``) so the families above apply unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chebyshev import chebyshev_matrix

DET_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryCondition:
    """Two-point boundary operator a u(+-1) + b u'(+-1) = c."""

    kind: str  # dirichlet | neumann | robin | periodic
    a_minus: float = 0.0
    b_minus: float = 0.0
    c_minus: float = 0.0
    a_plus: float = 0.0
    b_plus: float = 0.0
    c_plus: float = 0.0

    def __post_init__(self):
        k = self.kind
        if k not in ("dirichlet", "neumann", "robin", "periodic"):
            raise ValueError(f"unknown boundary kind {k!r}")
        if k == "periodic":
            return
        if (self.a_minus == 0.0 and self.b_minus == 0.0) or (
            self.a_plus == 0.0 and self.b_plus == 0.0
        ):
            raise ValueError("boundary operator vanishes at an endpoint")
        if k == "dirichlet" and not (
            self.b_minus == 0.0 and self.b_plus == 0.0
        ):
            raise ValueError("dirichlet condition must have b_- = b_+ = 0")
        if k == "neumann" and not (
            self.a_minus == 0.0 and self.a_plus == 0.0
        ):
            raise ValueError("neumann condition must have a_- = a_+ = 0")

    @property
    def homogeneous(self) -> bool:
        return self.c_minus == 0.0 and self.c_plus == 0.0


def dirichlet(c_minus: float = 0.0, c_plus: float = 0.0) -> BoundaryCondition:
    return BoundaryCondition(
        "dirichlet", a_minus=1.0, c_minus=c_minus, a_plus=1.0, c_plus=c_plus
    )


def neumann(c_minus: float = 0.0, c_plus: float = 0.0) -> BoundaryCondition:
    return BoundaryCondition(
        "neumann", b_minus=1.0, c_minus=c_minus, b_plus=1.0, c_plus=c_plus
    )


def robin(a_minus, b_minus, c_minus, a_plus, b_plus, c_plus) -> BoundaryCondition:
    return BoundaryCondition(
        "robin", a_minus, b_minus, c_minus, a_plus, b_plus, c_plus
    )


def periodic() -> BoundaryCondition:
    return BoundaryCondition("periodic")


@dataclass(frozen=True)
class LiftingPolynomial:
    """Low-degree shift u_bar absorbing non-homogeneous two-point data.

    form ``quadratic``: u_bar = beta x^2 + gamma x (pure-Neumann data),
    form ``linear``:    u_bar = beta x + gamma (everything else).
    """

    beta: float
    gamma: float
    form: str  # linear | quadratic

    def __call__(self, x):
        if self.form == "quadratic":
            return self.beta * np.square(x) + self.gamma * np.asarray(x)
        return self.beta * np.asarray(x) + self.gamma

    def deriv(self, x, order: int = 1):
        x = np.asarray(x, dtype=float)
        if order == 1:
            if self.form == "quadratic":
                return 2.0 * self.beta * x + self.gamma
            return np.full_like(x, self.beta)
        if order == 2:
            return np.full_like(x, 2.0 * self.beta if self.form == "quadratic" else 0.0)
        raise ValueError(f"unsupported derivative order {order}")


def homogenize(bc: BoundaryCondition) -> LiftingPolynomial:
    """Solve for the polynomial shift that zeroes the boundary data.

    Pure-Neumann data needs the quadratic form (a constant cannot carry
    derivative data); any condition with a nonzero value coefficient uses
    the linear form.
    """
    if bc.kind == "periodic":
        raise ValueError("periodic conditions carry no boundary data to lift")
    if bc.a_minus == 0.0 and bc.a_plus == 0.0:
        # beta x^2 + gamma x with derivative data only
        a11, a12 = -2.0 * bc.b_minus, bc.b_minus
        a21, a22 = 2.0 * bc.b_plus, bc.b_plus
        form = "quadratic"
    else:
        # beta x + gamma
        a11, a12 = -bc.a_minus + bc.b_minus, bc.a_minus
        a21, a22 = bc.a_plus + bc.b_plus, bc.a_plus
        form = "linear"
    det = a11 * a22 - a12 * a21
    scale = max(abs(a11), abs(a12), abs(a21), abs(a22), 1.0)
    if abs(det) <= DET_TOL * scale * scale:
        raise ValueError(f"singular lifting system (determinant {det!r})")
    beta = (bc.c_minus * a22 - bc.c_plus * a12) / det
    gamma = (a11 * bc.c_plus - a21 * bc.c_minus) / det
    return LiftingPolynomial(beta=beta, gamma=gamma, form=form)


def robin_coeffs(k: int, bc: BoundaryCondition) -> tuple[float, float]:
    """Coefficients (a_k, b_k) making T_k + a_k T_{k+1} + b_k T_{k+2} satisfy
    the homogeneous boundary operator at both endpoints.

    Uses T_m(+-1) = (+-1)^m and T'_m(+-1) = (+-1)^(m-1) m^2 to reduce the two
    endpoint conditions to a 2x2 system.
    """
    if bc.kind == "periodic":
        raise ValueError("periodic directions use the fourier family")
    am, bm = bc.a_minus, bc.b_minus
    ap, bp = bc.a_plus, bc.b_plus
    k1sq, k2sq = float((k + 1) ** 2), float((k + 2) ** 2)
    a11 = ap + bp * k1sq
    a12 = ap + bp * k2sq
    a21 = -(am - bm * k1sq)
    a22 = am - bm * k2sq
    r1 = -ap - bp * k * k
    r2 = -am + bm * k * k
    det = a11 * a22 - a12 * a21
    scale = max(abs(a11), abs(a12), abs(a21), abs(a22), 1.0)
    if abs(det) <= DET_TOL * scale * scale:
        raise ValueError(f"degenerate boundary system for basis index k={k}")
    a_k = (r1 * a22 - r2 * a12) / det
    b_k = (a11 * r2 - a21 * r1) / det
    return a_k, b_k


@dataclass(frozen=True)
class BasisFamily:
    """Ordered 1D basis with evaluation and derivative rules.

    For ``chebyshev_bc``, ``coeffs[k]`` holds the pair (a_k, b_k) of member k.
    For ``fourier``, members are 1, cos(pi t), sin(pi t), cos(2 pi t), ... in
    that order, truncated at ``size``.
    """

    kind: str  # chebyshev_bc | fourier
    size: int
    bc: BoundaryCondition
    coeffs: tuple[tuple[float, float], ...] = ()

    @property
    def max_degree(self) -> int:
        """Highest Chebyshev degree used (chebyshev_bc only)."""
        return self.size + 1

    def value_matrix(self, x, order: int = 0) -> np.ndarray:
        """Member values/derivatives at points x, shape (len(x), size)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "chebyshev_bc":
            t = chebyshev_matrix(self.max_degree, x, order=order)
            out = np.empty((x.shape[0], self.size))
            for k, (a_k, b_k) in enumerate(self.coeffs):
                out[:, k] = t[:, k] + a_k * t[:, k + 1] + b_k * t[:, k + 2]
            return out
        if order not in (0, 1, 2):
            raise ValueError(f"unsupported derivative order {order}; only 0, 1, 2")
        out = np.empty((x.shape[0], self.size))
        for j in range(self.size):
            out[:, j] = _fourier_member(j, x, order)
        return out

    def eval(self, k: int, x, order: int = 0):
        if not 0 <= k < self.size:
            raise IndexError(f"basis index {k} out of range for size {self.size}")
        scalar = np.isscalar(x)
        vals = self.value_matrix(x, order=order)[:, k]
        return float(vals[0]) if scalar else vals


def _fourier_member(j: int, t: np.ndarray, order: int) -> np.ndarray:
    if j == 0:
        return np.ones_like(t) if order == 0 else np.zeros_like(t)
    freq = (j + 1) // 2
    w = freq * np.pi
    arg = w * t
    if j % 2 == 1:  # cos branch
        if order == 0:
            return np.cos(arg)
        if order == 1:
            return -w * np.sin(arg)
        return -w * w * np.cos(arg)
    if order == 0:
        return np.sin(arg)
    if order == 1:
        return w * np.cos(arg)
    return -w * w * np.sin(arg)


def build_family(kind: str, size: int, bc: BoundaryCondition) -> BasisFamily:
    """Construct a basis family of the given kind and size."""
    if size < 1:
        raise ValueError(f"family size must be >= 1, got {size}")
    if kind == "chebyshev_bc":
        if bc.kind == "periodic":
            raise ValueError("chebyshev_bc family requires a non-periodic condition")
        coeffs = tuple(robin_coeffs(k, bc) for k in range(size))
        return BasisFamily(kind=kind, size=size, bc=bc, coeffs=coeffs)
    if kind == "fourier":
        if bc.kind != "periodic":
            raise ValueError("fourier family requires a periodic condition")
        return BasisFamily(kind=kind, size=size, bc=bc)
    raise ValueError(f"unknown family kind {kind!r}")


def eval_basis(fam: BasisFamily, k: int, x, order: int = 0):
    """Value or derivative of member k of the family at x."""
    return fam.eval(k, x, order=order)
