"""Zero-temperature Casimir force and pressure between real metals.

The pressure between two half-spaces and the sphere-plane force are
double integrals over imaginary frequency xi and the wave parameter p.
With the dimensionless frequency u = 2 xi z / c both reduce to

    P(z) = -(hbar c / 32 pi^2 z^4) * integral_0^inf u^3 K_P(u) du
    F(z) = -(hbar c R / 16 pi z^3) * integral_0^inf u^2 K_F(u) du

where K_P and K_F are the inner wave-vector integrals evaluated by the
kernel backend with both polarizations and s_j = sqrt(eps_j - 1 + p^2).
Perfect conductors take the ideal limit (reflection products = 1), which
reproduces the closed forms -pi^2 hbar c / 240 z^4 and
-pi^3 hbar c R / 360 z^3 exactly; those serve as the quadrature oracle.

Sign convention (used package-wide): attractive forces and pressures are
negative; the force gradient d|F|/... is reported positive for an
attraction weakening with distance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend
from .constants import CODATA, HBARC_EV_M
from .errors import ConvergenceError, DomainError
from .materials import DielectricModel, PerfectConductor, Tabulated
from .numerics import adaptive_quadrature

TOL_MIN = 1e-8
TOL_MAX = 1e-3

# Materials are never queried below this photon energy; with a Drude tail
# eps ~ 1/xi the reflection products approach their ideal limit there, so
# the clamp is invisible at the supported tolerances (halving it moves
# results by far less than TOL_MIN).
XI_FLOOR_EV = 1e-5

# Running-peak cutoff for extending the frequency grid upward.
_PEAK_CUTOFF = 1e-12
_U_START = 1.0 / 64.0
_U_HARD_MAX = 512.0


@dataclass(frozen=True)
class SpherePlaneGeometry:
    """Sphere of radius ``radius`` above a plane at surface gap ``separation``.

    ``delta0`` is the per-surface mean contact offset: rough surfaces touch
    at mean separation 2*delta0, and measured gaps relate to the force
    separation through z = z_metal + 2*delta0.
    All lengths in meters.
    """

    radius: float
    separation: float
    delta0: float = 0.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("sphere radius must be > 0")
        if not self.separation > 0:
            raise DomainError("separation must be > 0")
        if self.delta0 < 0:
            raise DomainError("contact offset delta0 must be >= 0")
        if self.separation / self.radius > 0.1:
            warnings.warn(
                "separation exceeds 10% of the sphere radius; the "
                "sphere-plane force formula assumes z << R",
                stacklevel=2,
            )


@dataclass(frozen=True)
class LifshitzResult:
    """Converged integral value with its accuracy bookkeeping.

    ``value`` is in N/m^2 (pressure), N (force) or N/m (gradient);
    ``est_rel_error`` bounds the quadrature error relative to ``value``;
    ``evaluations`` counts integrand evaluations in the inner kernels.
    """

    value: float
    est_rel_error: float
    evaluations: int


def ideal_pressure_plane_plane(z: float) -> float:
    """Ideal-metal pressure between two planes: -pi^2 hbar c / 240 z^4."""
    if not z > 0:
        raise DomainError("separation must be > 0")
    return -(math.pi**2) * CODATA.hbar * CODATA.c / (240.0 * z**4)


def ideal_force_sphere_plane(z: float, radius: float) -> float:
    """Ideal-metal sphere-plane force: -pi^3 hbar c R / 360 z^3."""
    if not z > 0:
        raise DomainError("separation must be > 0")
    if not radius > 0:
        raise DomainError("sphere radius must be > 0")
    return -(math.pi**3) * CODATA.hbar * CODATA.c * radius / (360.0 * z**3)


def _surface_eps(model) -> object:
    """Permittivity lookup for one surface: None marks the ideal limit."""
    if isinstance(model, PerfectConductor):
        return None
    if isinstance(model, Tabulated):
        return model.sampled().eps
    if isinstance(model, DielectricModel):
        return model.eps
    if callable(model):
        return model
    raise DomainError(f"not a dielectric model: {model!r}")


class _Counter:
    __slots__ = ("evals",)

    def __init__(self):
        self.evals = 0


def _outer_integral(kind: str, z: float, m1, m2, tol: float,
                    xi_floor_ev: float) -> tuple[float, float, int]:
    """Adaptive frequency integral of u^n * K(u); returns (value, rel_err, evals)."""
    if not z > 0:
        raise DomainError("separation must be > 0")
    if not TOL_MIN <= tol <= TOL_MAX:
        raise DomainError(f"tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}]")
    eps1 = _surface_eps(m1)
    eps2 = _surface_eps(m2)
    e_scale = HBARC_EV_M / (2.0 * z)  # photon energy per unit u, eV
    inner_rtol = tol / 20.0
    # Late binding: the active kernel backend can be swapped at runtime
    # (benchmarks, fallback forcing).
    kernels = _backend.kernels
    inner = kernels.pressure_inner if kind == "pressure" else kernels.force_inner
    power = 3 if kind == "pressure" else 2
    counter = _Counter()

    def h(u_arr: np.ndarray) -> np.ndarray:
        out = np.empty_like(u_arr)
        for i, u in enumerate(u_arr):
            xi_ev = max(u * e_scale, xi_floor_ev)
            e1 = -1.0 if eps1 is None else eps1(xi_ev)
            e2 = -1.0 if eps2 is None else eps2(xi_ev)
            val, _, ev = inner(u, e1, e2, inner_rtol)
            counter.evals += ev
            out[i] = u**power * val
        return out

    # March log-spaced edges upward until the integrand falls below the
    # running peak by _PEAK_CUTOFF; the tail beyond is exponentially dead.
    edges = [0.0, _U_START]
    peak = 0.0
    u_edge = _U_START
    while u_edge < _U_HARD_MAX:
        probe = abs(float(h(np.array([u_edge]))[0]))
        peak = max(peak, probe)
        if u_edge >= 16.0 and probe < _PEAK_CUTOFF * peak:
            break
        u_edge *= 2.0
        edges.append(u_edge)

    try:
        quad = adaptive_quadrature(h, edges, rel_tol=0.5 * tol)
    except ConvergenceError as exc:
        partial = exc.partial
        rel = partial.error / max(abs(partial.value), 1e-300) + 1.25 * inner_rtol
        raise _OuterDiverged(str(exc), partial.value, rel, counter.evals) from None
    rel_err = quad.error / max(abs(quad.value), 1e-300) + 1.25 * inner_rtol
    return quad.value, rel_err, counter.evals


class _OuterDiverged(Exception):
    """Internal: frequency integral ran out of budget; carries raw pieces."""

    def __init__(self, message: str, value: float, rel: float, evals: int):
        super().__init__(message)
        self.value = value
        self.rel = rel
        self.evals = evals


def pressure_plane_plane(z: float, m1, m2, tol: float = 1e-6,
                         xi_floor_ev: float = XI_FLOOR_EV) -> LifshitzResult:
    """Casimir pressure between two half-spaces at separation z (meters).

    Negative (attractive). ``m1``/``m2`` are DielectricModel instances or
    callables xi_ev -> eps; the result is symmetric under their exchange.
    Raises ConvergenceError (with the partial LifshitzResult attached) if
    the quadrature budget is exhausted before reaching ``tol``.
    """
    if not z > 0:
        raise DomainError("separation must be > 0")
    prefactor = -CODATA.hbar * CODATA.c / (32.0 * math.pi**2 * z**4)
    try:
        val, rel, evals = _outer_integral("pressure", z, m1, m2, tol, xi_floor_ev)
    except _OuterDiverged as exc:
        raise ConvergenceError(
            str(exc), partial=LifshitzResult(prefactor * exc.value, exc.rel, exc.evals)
        ) from None
    return LifshitzResult(prefactor * val, rel, evals)


def force_sphere_plane(z: float, radius: float, m1, m2, tol: float = 1e-6,
                       xi_floor_ev: float = XI_FLOOR_EV) -> LifshitzResult:
    """Casimir force on a sphere of given radius above a plane (Newtons).

    Negative (attractive); proximity-force form, valid for z << radius.
    """
    if not radius > 0:
        raise DomainError("sphere radius must be > 0")
    if not z > 0:
        raise DomainError("separation must be > 0")
    # The inner logarithms are negative, so the positive prefactor keeps
    # the force attractive.
    prefactor = CODATA.hbar * CODATA.c * radius / (16.0 * math.pi * z**3)
    try:
        val, rel, evals = _outer_integral("force", z, m1, m2, tol, xi_floor_ev)
    except _OuterDiverged as exc:
        raise ConvergenceError(
            str(exc), partial=LifshitzResult(prefactor * exc.value, exc.rel, exc.evals)
        ) from None
    return LifshitzResult(prefactor * val, rel, evals)


def force_gradient_sphere_plane(z: float, radius: float, m1, m2,
                                tol: float = 1e-6,
                                xi_floor_ev: float = XI_FLOOR_EV) -> LifshitzResult:
    """Sphere-plane force gradient dF/dz = 2 pi R P, reported positive.

    The proximity-force identity ties the gradient to the two-plane
    pressure; an attractive force weakening with distance gives a
    positive gradient under the package sign convention.
    """
    if not radius > 0:
        raise DomainError("sphere radius must be > 0")
    p = pressure_plane_plane(z, m1, m2, tol=tol, xi_floor_ev=xi_floor_ev)
    return LifshitzResult(2.0 * math.pi * radius * abs(p.value),
                          p.est_rel_error, p.evaluations)


__all__ = [
    "SpherePlaneGeometry",
    "LifshitzResult",
    "ideal_pressure_plane_plane",
    "ideal_force_sphere_plane",
    "pressure_plane_plane",
    "force_sphere_plane",
    "force_gradient_sphere_plane",
    "XI_FLOOR_EV",
    "TOL_MIN",
    "TOL_MAX",
]
