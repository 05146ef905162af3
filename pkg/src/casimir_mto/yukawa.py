"""Hypothetical Yukawa force between the layered test bodies.

A new short-range interaction adds a pair potential
-G alpha m1 m2 exp(-r/lambda)/r to Newtonian gravity. Integrating it over
a homogeneous sphere above a homogeneous half-space gives the closed form

    F(z) = 4 pi^2 G alpha rho_s rho_p lambda^3 e^(-z/lambda)
           * [(R - lambda) + (R + lambda) e^(-2R/lambda)],

exact for any lambda (superposition; no proximity approximation).
Coated bodies decompose into density steps: each coating of thickness t
adds a nested body whose surface sits t deeper, picking up the expected
exp(-t/lambda) attenuation. A brute-force cylindrical-grid integration of
the bare pair force over both volumes serves as the independent check.

Force magnitudes are reported positive; alpha enters linearly, so
exclusion limits scale directly out of residual force bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .constants import CODATA
from .errors import ConfigurationError, DomainError, ValidationError

# Standard reference densities, kg/m^3 (bulk handbook values).
DENSITIES = {
    "gold": 19300.0,
    "copper": 8960.0,
    "chromium": 7190.0,
    "alumina": 3980.0,
    "silicon": 2330.0,
}

# Integration support: exp(-45) ~ 3e-20 is far below any tolerance used.
_SUPPORT_FOLDS = 45.0


@dataclass(frozen=True)
class YukawaParams:
    """Interaction strength (dimensionless) and range (m)."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("range lambda must be > 0")


@dataclass(frozen=True)
class Layer:
    """One coating: thickness (m) and density (kg/m^3)."""

    thickness: float
    density: float

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValidationError("layer thickness must be > 0")
        if not self.density > 0:
            raise ValidationError("layer density must be > 0")


@dataclass(frozen=True)
class LayeredBody:
    """Sphere or half-space with coatings listed outermost-first."""

    shape: str                    # "sphere" | "half_space"
    core_density: float
    layers: tuple[Layer, ...] = ()
    radius: float | None = None   # outer radius for spheres

    def __post_init__(self):
        if self.shape not in ("sphere", "half_space"):
            raise ValidationError(f"unknown shape {self.shape!r}")
        if not self.core_density > 0:
            raise ValidationError("core density must be > 0")
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.shape == "sphere":
            if self.radius is None or not self.radius > 0:
                raise ValidationError("sphere needs a positive outer radius")
            if sum(l.thickness for l in self.layers) >= self.radius:
                raise ValidationError("coatings thicker than the sphere radius")

    @classmethod
    def sphere(cls, radius: float, core_density: float,
               layers: Sequence[Layer] = ()) -> "LayeredBody":
        return cls("sphere", core_density, tuple(layers), radius)

    @classmethod
    def half_space(cls, core_density: float,
                   layers: Sequence[Layer] = ()) -> "LayeredBody":
        return cls("half_space", core_density, tuple(layers))

    def density_steps(self) -> list[tuple[float, float]]:
        """(depth below outer surface, density step) superposition.

        The body equals a stack of nested homogeneous bodies: the
        outermost density from the surface, plus each interface's density
        difference starting at its depth.
        """
        steps = []
        depth = 0.0
        prev = 0.0
        for layer in self.layers:
            steps.append((depth, layer.density - prev))
            prev = layer.density
            depth += layer.thickness
        steps.append((depth, self.core_density - prev))
        return steps


def reference_sphere(radius: float = 294.3e-6) -> LayeredBody:
    """Au-coated sapphire sphere: 203 nm Au over 1 nm Cr on an alumina core."""
    return LayeredBody.sphere(
        radius,
        DENSITIES["alumina"],
        (Layer(203e-9, DENSITIES["gold"]), Layer(1e-9, DENSITIES["chromium"])),
    )


def reference_plate() -> LayeredBody:
    """Cu-coated plate: 200 nm Cu over 1 nm Cr on polysilicon."""
    return LayeredBody.half_space(
        DENSITIES["silicon"],
        (Layer(200e-9, DENSITIES["copper"]), Layer(1e-9, DENSITIES["chromium"])),
    )


def _unit_force(gap: float, radius: float, lam: float) -> float:
    """Closed-form sphere/half-space force per (G alpha rho_s rho_p)."""
    bracket = (radius - lam) + (radius + lam) * math.exp(-2.0 * radius / lam)
    return 4.0 * math.pi**2 * lam**3 * math.exp(-gap / lam) * bracket


def yukawa_force_sphere_plane(p: YukawaParams, sphere: LayeredBody,
                              plate: LayeredBody, z: float) -> float:
    """Attraction magnitude (N) between the coated sphere and plate at gap z."""
    if not z > 0:
        raise DomainError("separation must be > 0")
    if sphere.shape != "sphere" or plate.shape != "half_space":
        raise DomainError("expected a sphere over a half-space")
    total = 0.0
    for d_s, drho_s in sphere.density_steps():
        r_i = sphere.radius - d_s
        for d_p, drho_p in plate.density_steps():
            total += drho_s * drho_p * _unit_force(z + d_s + d_p, r_i, p.lam)
    return CODATA.G * p.alpha * total


def _half_space_field(h_grid: np.ndarray, lam: float, n: int) -> np.ndarray:
    """Vertical Yukawa force per unit (G alpha rho m) on a point mass at
    heights ``h_grid`` above a unit-density half-space, by direct
    cylindrical quadrature (no closed forms)."""
    span = _SUPPORT_FOLDS * lam
    dt = span / n
    t = (np.arange(n) + 0.5) * dt           # depth below the surface
    dr = span / n
    r = (np.arange(n) + 0.5) * dr           # cylindrical radius
    out = np.zeros_like(h_grid)
    r2 = r * r
    for ti in t:
        ht = h_grid[:, None] + ti           # vertical distance to the ring
        s2 = ht * ht + r2[None, :]
        s = np.sqrt(s2)
        integrand = r[None, :] * ht * (1.0 / s + 1.0 / lam) * np.exp(-s / lam) / s2
        out += integrand.sum(axis=1)
    return 2.0 * math.pi * out * dr * dt


def yukawa_force_brute(p: YukawaParams, sphere: LayeredBody,
                       plate: LayeredBody, z: float,
                       rel_conv: float = 3e-3, n_start: int = 96,
                       max_rounds: int = 6) -> float:
    """Brute-force volume integration of the pair force (test oracle).

    The plate's field is integrated on a (radius, depth) grid; the sphere
    is sliced horizontally. Resolution doubles until successive estimates
    agree to ``rel_conv``.
    """
    if not z > 0:
        raise DomainError("separation must be > 0")
    lam = p.lam
    span = _SUPPORT_FOLDS * lam
    prev = None
    n = n_start
    for _ in range(max_rounds):
        # Field of the layered plate at heights above its outer surface.
        h_lo, h_hi = z * 0.5, z + span + 2e-6
        h_grid = np.linspace(h_lo, h_hi, 4 * n)
        field = np.zeros_like(h_grid)
        for d_p, drho_p in plate.density_steps():
            field += drho_p * _half_space_field(h_grid + d_p, lam, n)

        total = 0.0
        for d_s, drho_s in sphere.density_steps():
            r_i = sphere.radius - d_s
            gap_i = z + d_s
            zeta_max = min(2.0 * r_i, span)
            dz = zeta_max / (4 * n)
            zeta = (np.arange(4 * n) + 0.5) * dz
            area = math.pi * zeta * (2.0 * r_i - zeta)
            phi = np.interp(gap_i + zeta, h_grid, field)
            total += drho_s * float(np.dot(area, phi)) * dz

        value = CODATA.G * p.alpha * total
        if prev is not None and abs(value - prev) <= rel_conv * abs(value):
            return value
        prev = value
        n *= 2
    raise ConfigurationError(
        f"brute-force Yukawa integration did not self-converge to {rel_conv:g}"
    )


def alpha_limit(residual_bound: Callable[[float], float] | Sequence[float],
                lam: float, sphere: LayeredBody, plate: LayeredBody,
                z_grid: Sequence[float]) -> float:
    """Smallest alpha whose Yukawa force would exceed the residual bound.

    ``residual_bound`` maps separation to the experimental force bound (N),
    or supplies one bound per grid point. The limit is
    min over z of bound(z) / F(alpha=1, z); alpha-linearity is exact.
    """
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=float))
    if z_grid.size == 0:
        raise ConfigurationError("empty separation grid")
    if callable(residual_bound):
        bounds = np.array([float(residual_bound(z)) for z in z_grid])
    else:
        bounds = np.atleast_1d(np.asarray(residual_bound, dtype=float))
        if bounds.shape != z_grid.shape:
            raise ConfigurationError("bound array must match the grid")
    if np.any(bounds <= 0):
        raise DomainError("residual bounds must be positive")
    unit = YukawaParams(alpha=1.0, lam=lam)
    forces = np.array([
        yukawa_force_sphere_plane(unit, sphere, plate, float(z)) for z in z_grid
    ])
    return float(np.min(bounds / forces))
