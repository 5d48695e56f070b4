"""Coordinate maps between the reference cube and physical domains.

Radially parameterized domains (annulus, disk, cylinder shell) are pulled
back to the cube through the stretching transform

    z = 2 (r - f1) / (f2 - f1) - 1,        theta = (t + 1) pi,

with t in [-1, 1) covering one period.  All benchmark domains use constant
radial profiles f1, f2; the profile-derivative terms of the general polar
transform are kept in ``radial_profile_coupling`` for reference and vanish in
every map constructed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class DomainMap:
    """Map from the reference cube [-1,1]^dim to a physical domain.

    kind:
      identity_rect   p -> p (any dim)
      annulus         (s, t) -> (r cos th, r sin th), f1 > 0
      disk            (s, t) -> same with f1 = 0 (s = -1 is the center)
      cylinder_shell  (s, t, z) -> (r cos th, r sin th, z)
    """

    kind: str
    dim: int
    f1: float = 0.0
    f2: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity_rect", "annulus", "disk", "cylinder_shell"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind != "identity_rect":
            if self.f2 - self.f1 < SINGULAR_TOL:
                raise ValueError("radial profiles must satisfy f1 < f2")
            if self.kind == "disk" and self.f1 != 0.0:
                raise ValueError("disk map requires f1 = 0")
            if self.kind in ("annulus", "cylinder_shell") and self.f1 <= 0.0:
                raise ValueError(f"{self.kind} map requires f1 > 0")

    @property
    def radial_axis(self) -> int:
        return 0

    @property
    def angular_axis(self) -> int:
        return 1

    def radius(self, s):
        """Physical radius from the stretched coordinate s in [-1, 1]."""
        return self.f1 + (np.asarray(s, dtype=float) + 1.0) * 0.5 * (self.f2 - self.f1)

    def angle(self, t):
        """Physical angle theta = (t + 1) pi."""
        return (np.asarray(t, dtype=float) + 1.0) * np.pi


def identity_map(dim: int) -> DomainMap:
    return DomainMap("identity_rect", dim)


def annulus_map(f1: float, f2: float) -> DomainMap:
    return DomainMap("annulus", 2, f1, f2)


def disk_map(f2: float = 1.0) -> DomainMap:
    return DomainMap("disk", 2, 0.0, f2)


def cylinder_shell_map(f1: float, f2: float) -> DomainMap:
    return DomainMap("cylinder_shell", 3, f1, f2)


def stretch_z(r, theta, dmap: DomainMap) -> float | np.ndarray:
    """Stretched coordinate z in [-1, 1] for radius r (theta unused for
    constant profiles, kept for the general signature)."""
    del theta
    r = np.asarray(r, dtype=float)
    width = dmap.f2 - dmap.f1
    z = 2.0 * (r - dmap.f1) / width - 1.0
    if np.any(z < -1.0 - 1e-12) or np.any(z > 1.0 + 1e-12):
        raise ValueError(f"radius outside [{dmap.f1}, {dmap.f2}]")
    out = np.clip(z, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def param_to_physical(dmap: DomainMap, p) -> np.ndarray:
    """Cartesian coordinates of reference-cube points p (shape (..., dim))."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if p.shape[-1] != dmap.dim:
        raise ValueError(f"points have dimension {p.shape[-1]}, map expects {dmap.dim}")
    if dmap.kind == "identity_rect":
        return p.copy()
    r = dmap.radius(p[:, 0])
    th = dmap.angle(p[:, 1])
    x = r * np.cos(th)
    y = r * np.sin(th)
    if dmap.kind == "cylinder_shell":
        return np.stack([x, y, p[:, 2]], axis=-1)
    return np.stack([x, y], axis=-1)


def map_jacobian(dmap: DomainMap, p) -> np.ndarray:
    """d(physical)/d(parameter), shape (n, dim, dim)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    n = p.shape[0]
    if dmap.kind == "identity_rect":
        return np.broadcast_to(np.eye(dmap.dim), (n, dmap.dim, dmap.dim)).copy()
    h = 0.5 * (dmap.f2 - dmap.f1)  # dr/ds
    r = dmap.radius(p[:, 0])
    th = dmap.angle(p[:, 1])
    c, s = np.cos(th), np.sin(th)
    jac = np.zeros((n, dmap.dim, dmap.dim))
    jac[:, 0, 0] = h * c
    jac[:, 0, 1] = -r * np.pi * s
    jac[:, 1, 0] = h * s
    jac[:, 1, 1] = r * np.pi * c
    if dmap.kind == "cylinder_shell":
        jac[:, 2, 2] = 1.0
    return jac


def map_second_derivs(dmap: DomainMap, p) -> np.ndarray:
    """d^2(physical)/d(parameter)^2, shape (n, dim, dim, dim)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    n = p.shape[0]
    sec = np.zeros((n, dmap.dim, dmap.dim, dmap.dim))
    if dmap.kind == "identity_rect":
        return sec
    h = 0.5 * (dmap.f2 - dmap.f1)
    r = dmap.radius(p[:, 0])
    th = dmap.angle(p[:, 1])
    c, s = np.cos(th), np.sin(th)
    pi2 = np.pi * np.pi
    sec[:, 0, 0, 1] = sec[:, 0, 1, 0] = -h * np.pi * s
    sec[:, 0, 1, 1] = -r * pi2 * c
    sec[:, 1, 0, 1] = sec[:, 1, 1, 0] = h * np.pi * c
    sec[:, 1, 1, 1] = -r * pi2 * s
    return sec


def radial_profile_coupling(z, f1, f2, df1, df2):
    """Coefficient of du/dz in the angular-derivative transform.

    For z = 2(r - f1(th))/(f2(th) - f1(th)) - 1 at fixed r,
    dz/dth = -[z (f2' - f1') + (f2' + f1')] / (f2 - f1); this is the factor
    multiplying du/dz when converting du/dth at fixed z to fixed r.  It
    vanishes for constant profiles.
    """
    width = f2 - f1
    if width < SINGULAR_TOL:
        raise ValueError("degenerate radial width f2 - f1")
    return -(np.asarray(z, dtype=float) * (df2 - df1) + (df2 + df1)) / width


@dataclass(frozen=True)
class PolarFactors:
    """Multipliers relating physical-polar derivatives to stretched ones."""

    dr_factor: float  # du/dr = dr_factor * du/dz
    theta_coupling: float  # du/dth|_r = du/dth|_z + theta_coupling * du/dz
    radius: float  # physical radius at the evaluation point


def polar_derivative_factors(dmap: DomainMap, p) -> PolarFactors:
    """Derivative-transform factors at a single interior parameter point."""
    if dmap.kind == "identity_rect":
        raise ValueError("identity maps have no polar factors")
    p = np.asarray(p, dtype=float).reshape(-1)
    width = dmap.f2 - dmap.f1
    if width < SINGULAR_TOL:
        raise ValueError("degenerate radial width f2 - f1")
    r = float(dmap.radius(p[0]))
    if r < SINGULAR_TOL:
        raise ValueError("polar factors are singular at the center r = 0")
    coupling = float(radial_profile_coupling(p[0], dmap.f1, dmap.f2, 0.0, 0.0))
    return PolarFactors(dr_factor=2.0 / width, theta_coupling=coupling, radius=r)
