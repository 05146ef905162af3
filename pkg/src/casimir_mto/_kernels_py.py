"""Pure-NumPy inner quadrature kernels for the Lifshitz integrals.

At a fixed (scaled) imaginary frequency ``u = 2 xi z / c`` the two-plane
pressure and the sphere-plane force need the wave-vector integral

    P-kernel:  integral over p in [1, inf) of
               p^2 * sum_pol Q w / (1 - Q w),     w = exp(-p u),
    F-kernel:  integral over p in [1, inf) of
               p   * sum_pol log(1 - Q w),

where Q is the product of the two surfaces' reflection factors for one
polarization and the permittivities enter through s = sqrt(eps - 1 + p^2).
The substitution p = 1/t maps the domain onto (0, 1]; panels refine
adaptively under a 15-point Gauss-Kronrod rule, with every rule
application vectorized across the pending panels.

The compiled extension (``_kernels``) implements the identical algorithm;
this module is the fallback selected at import when the extension is
missing. Both expose:

    pressure_inner(u, e1, e2, rtol) -> (value, abs_error, evaluations)
    force_inner(u, e1, e2, rtol)    -> (value, abs_error, evaluations)

``e <= 0`` marks the corresponding surface as a perfect conductor (its
reflection factors are exactly 1 for both polarizations).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_MAX_PANELS = 4096

# (G7, K15) rule on [-1, 1], ordered negative to positive abscissa.
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG7 = np.array([
    0.129484966168870, 0.279705391489277,
    0.381830050505119, 0.417959183673469,
])
_WG = np.zeros(15)
_WG[1:-1:2] = np.concatenate([_WG7[:-1], _WG7[::-1]])

_PRESSURE = 0
_FORCE = 1


def _surface_factors(e: float, p: np.ndarray):
    """Reflection factors (TE, TM) of one surface at wave parameter p.

    Cancellation-free forms: (s-p)(s+p) = e-1 and
    (e p - s)(e p + s) = (e-1)(p^2(e+1) - 1).
    """
    if e <= 0.0:
        one = np.ones_like(p)
        return one, one
    s = np.sqrt(e - 1.0 + p * p)
    fte = (e - 1.0) / ((s + p) ** 2)
    ftm = (e - 1.0) * (p * p * (e + 1.0) - 1.0) / ((e * p + s) ** 2)
    return fte, ftm


def _integrand(kind: int, t: np.ndarray, u: float, e1: float, e2: float):
    """Integrand after p = 1/t, finite and smooth on (0, 1]."""
    p = 1.0 / t
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.exp(-u * p)
        fte1, ftm1 = _surface_factors(e1, p)
        fte2, ftm2 = _surface_factors(e2, p)
        qte = fte1 * fte2 * w
        qtm = ftm1 * ftm2 * w
        if kind == _PRESSURE:
            g = p ** 4 * (qte / (1.0 - qte) + qtm / (1.0 - qtm))
        else:
            g = p ** 3 * (np.log1p(-qte) + np.log1p(-qtm))
    # Underflowed exponential: the tail contributes exactly zero.
    return np.where(w > 0.0, g, 0.0)


def _initial_edges(u: float) -> np.ndarray:
    """Log-spaced panels: dense near t -> 0 where exp(-u/t) still bites."""
    if u >= 0.5:
        return np.array([0.0, 0.5, 1.0])
    edges = [0.0, u / 32.0]
    x = u / 32.0
    while x < 0.5:
        x *= 2.0
        edges.append(x)
    edges.append(1.0)
    return np.array(edges)


def _gk15_batch(kind: int, a: np.ndarray, b: np.ndarray, u, e1, e2):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = _integrand(kind, x, u, e1, e2)
    resk = half * (y @ _WK)
    resg = half * (y @ _WG)
    resabs = half * (np.abs(y) @ _WK)
    mean = resk / (b - a)
    resasc = half * (np.abs(y - mean[:, None]) @ _WK)
    err = np.abs(resk - resg)
    scale = np.ones_like(err)
    nz = (resasc != 0.0) & (err != 0.0)
    scale[nz] = np.minimum(1.0, (200.0 * err[nz] / resasc[nz]) ** 1.5)
    err = np.maximum(resasc * scale, 50.0 * np.finfo(float).eps * resabs)
    return resk, err


def _adaptive(kind: int, u: float, e1: float, e2: float, rtol: float):
    if u < 1e-12:
        raise ValueError("scaled frequency u must be >= 1e-12")
    edges = _initial_edges(u)
    a, b = edges[:-1], edges[1:]
    val, err = _gk15_batch(kind, a, b, u, e1, e2)
    evals = 15 * a.size
    i0 = abs(float(val.sum()))
    acc_val = 0.0
    acc_err = 0.0
    panels = a.size
    while a.size:
        # Accept on per-panel relative error, with a width-proportional
        # absolute slack so near-zero panels terminate.
        slack = 0.25 * rtol * i0 * (b - a)
        ok = err <= np.maximum(rtol * np.abs(val), slack)
        acc_val += float(val[ok].sum())
        acc_err += float(err[ok].sum())
        a, b = a[~ok], b[~ok]
        if a.size == 0:
            break
        panels += 2 * a.size
        if panels > _MAX_PANELS:
            raise RuntimeError(
                f"inner quadrature exceeded {_MAX_PANELS} panels at u={u:g}"
            )
        mid = 0.5 * (a + b)
        a = np.concatenate([a, mid])
        b = np.concatenate([mid, b])
        val, err = _gk15_batch(kind, a, b, u, e1, e2)
        evals += 15 * a.size
    return acc_val, acc_err, evals


def pressure_inner(u: float, e1: float, e2: float, rtol: float = 1e-8):
    """Wave-vector integral of the two-plane pressure at scaled frequency u."""
    return _adaptive(_PRESSURE, u, e1, e2, rtol)


def force_inner(u: float, e1: float, e2: float, rtol: float = 1e-8):
    """Wave-vector integral of the sphere-plane force at scaled frequency u."""
    return _adaptive(_FORCE, u, e1, e2, rtol)
