# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner quadrature kernels for the Lifshitz integrals.

C twin of ``_kernels_py``: identical panel scheme, Gauss-Kronrod rule and
acceptance logic, so the two backends agree to floating-point roundoff.
See the fallback module for the mathematical conventions.
"""

from libc.math cimport exp, log1p, sqrt, fabs, fmax, fmin, pow

cdef enum:
    MAX_STACK = 8192

cdef int _PRESSURE = 0
cdef int _FORCE = 1
cdef int _MAX_PANELS = 4096
cdef double _EPS50 = 50.0 * 2.220446049250313e-16

BACKEND = "compiled"

cdef double[15] _NODES
cdef double[15] _WK
cdef double[15] _WG

_NODES[:] = [
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
]
_WK[:] = [
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
]
_WG[:] = [
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0,
]


cdef inline double _integrand(int kind, double t, double u,
                              double e1, double e2) nogil:
    cdef double p, w, s, fte1, ftm1, fte2, ftm2, qte, qtm
    p = 1.0 / t
    w = exp(-u * p)
    if w == 0.0:
        return 0.0
    if e1 <= 0.0:
        fte1 = 1.0
        ftm1 = 1.0
    else:
        s = sqrt(e1 - 1.0 + p * p)
        fte1 = (e1 - 1.0) / ((s + p) * (s + p))
        ftm1 = (e1 - 1.0) * (p * p * (e1 + 1.0) - 1.0) / ((e1 * p + s) * (e1 * p + s))
    if e2 <= 0.0:
        fte2 = 1.0
        ftm2 = 1.0
    else:
        s = sqrt(e2 - 1.0 + p * p)
        fte2 = (e2 - 1.0) / ((s + p) * (s + p))
        ftm2 = (e2 - 1.0) * (p * p * (e2 + 1.0) - 1.0) / ((e2 * p + s) * (e2 * p + s))
    qte = fte1 * fte2 * w
    qtm = ftm1 * ftm2 * w
    if kind == _PRESSURE:
        return p * p * p * p * (qte / (1.0 - qte) + qtm / (1.0 - qtm))
    return p * p * p * (log1p(-qte) + log1p(-qtm))


cdef inline void _gk15(int kind, double a, double b, double u,
                       double e1, double e2,
                       double* out_val, double* out_err) nogil:
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double[15] y
    cdef double resk = 0.0, resg = 0.0, resabs = 0.0, resasc = 0.0
    cdef double err, mean, scale
    cdef int i
    for i in range(15):
        y[i] = _integrand(kind, mid + half * _NODES[i], u, e1, e2)
        resk += _WK[i] * y[i]
        resg += _WG[i] * y[i]
        resabs += _WK[i] * fabs(y[i])
    resk *= half
    resg *= half
    resabs *= half
    mean = resk / (b - a)
    for i in range(15):
        resasc += _WK[i] * fabs(y[i] - mean)
    resasc *= half
    err = fabs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        scale = fmin(1.0, pow(200.0 * err / resasc, 1.5))
        err = resasc * scale
    err = fmax(err, _EPS50 * resabs)
    out_val[0] = resk
    out_err[0] = err


cdef int _adaptive(int kind, double u, double e1, double e2, double rtol,
                   double* out_val, double* out_err, long* out_evals) nogil:
    # Pending panels carry their already-computed rule values.
    cdef double[MAX_STACK] sa
    cdef double[MAX_STACK] sb
    cdef double[MAX_STACK] sv
    cdef double[MAX_STACK] se
    cdef int top = 0
    cdef double edge, nxt, a, b, mid, v, e, v1, e1_, v2, e2_, i0, slack
    cdef double acc_val = 0.0, acc_err = 0.0
    cdef long evals = 0
    cdef int panels, i

    if u < 1e-12:
        return 2

    if u >= 0.5:
        sa[0] = 0.0; sb[0] = 0.5
        sa[1] = 0.5; sb[1] = 1.0
        top = 2
    else:
        edge = 0.0
        nxt = u / 32.0
        sa[top] = edge; sb[top] = nxt; top += 1
        edge = nxt
        while edge < 0.5:
            nxt = edge * 2.0
            sa[top] = edge; sb[top] = nxt; top += 1
            edge = nxt
            if top >= MAX_STACK - 2:
                return 1
        sa[top] = edge; sb[top] = 1.0; top += 1

    i0 = 0.0
    for i in range(top):
        _gk15(kind, sa[i], sb[i], u, e1, e2, &v, &e)
        sv[i] = v
        se[i] = e
        evals += 15
        i0 += v
    i0 = fabs(i0)
    panels = top

    while top > 0:
        top -= 1
        a = sa[top]
        b = sb[top]
        v = sv[top]
        e = se[top]
        slack = 0.25 * rtol * i0 * (b - a)
        if e <= fmax(rtol * fabs(v), slack):
            acc_val += v
            acc_err += e
            continue
        panels += 2
        if panels > _MAX_PANELS or top >= MAX_STACK - 2:
            return 1
        mid = 0.5 * (a + b)
        _gk15(kind, a, mid, u, e1, e2, &v1, &e1_)
        _gk15(kind, mid, b, u, e1, e2, &v2, &e2_)
        evals += 30
        sa[top] = a; sb[top] = mid; sv[top] = v1; se[top] = e1_; top += 1
        sa[top] = mid; sb[top] = b; sv[top] = v2; se[top] = e2_; top += 1

    out_val[0] = acc_val
    out_err[0] = acc_err
    out_evals[0] = evals
    return 0


cdef inline object _run(int kind, double u, double e1, double e2, double rtol):
    cdef double val = 0.0, err = 0.0
    cdef long evals = 0
    cdef int status
    with nogil:
        status = _adaptive(kind, u, e1, e2, rtol, &val, &err, &evals)
    if status == 2:
        raise ValueError("scaled frequency u must be >= 1e-12")
    if status != 0:
        raise RuntimeError(
            f"inner quadrature exceeded {_MAX_PANELS} panels at u={u:g}"
        )
    return val, err, evals


def pressure_inner(double u, double e1, double e2, double rtol=1e-8):
    """Wave-vector integral of the two-plane pressure at scaled frequency u."""
    return _run(_PRESSURE, u, e1, e2, rtol)


def force_inner(double u, double e1, double e2, double rtol=1e-8):
    """Wave-vector integral of the sphere-plane force at scaled frequency u."""
    return _run(_FORCE, u, e1, e2, rtol)
