"""Benchmark: compiled quadrature kernels vs the pure-NumPy fallback.

Swaps the active backend at runtime and times representative pipeline
calls. Run from the repository root:

    python benchmarks/bench_kernels.py
"""

import time

from casimir_mto import _backend
from casimir_mto.lifshitz import force_sphere_plane, pressure_plane_plane
from casimir_mto.materials import DrudeOnly, DrudeParams, PerfectConductor

GOLD = DrudeOnly(DrudeParams(9.0, 0.035))
COPPER = DrudeOnly(DrudeParams(8.9, 0.030))
IDEAL = PerfectConductor()

CASES = {
    "ideal pressure, z=1um, tol=1e-6":
        lambda: pressure_plane_plane(1e-6, IDEAL, IDEAL, tol=1e-6),
    "Drude Au/Cu pressure, z=0.5um, tol=1e-6":
        lambda: pressure_plane_plane(0.5e-6, GOLD, COPPER, tol=1e-6),
    "Drude Au/Cu force, z=0.5um, tol=1e-6":
        lambda: force_sphere_plane(0.5e-6, 294.3e-6, GOLD, COPPER, tol=1e-6),
    "Drude Au/Cu pressure, z=0.2um, tol=1e-8":
        lambda: pressure_plane_plane(0.2e-6, GOLD, COPPER, tol=1e-8),
}


def time_case(fn, min_time=0.5):
    fn()  # warm-up
    n = 0
    t0 = time.perf_counter()
    while True:
        fn()
        n += 1
        dt = time.perf_counter() - t0
        if dt >= min_time and n >= 3:
            return dt / n


def main():
    backends = _backend.available_backends()
    if len(backends) < 2:
        print("note: compiled kernels not built; timing the fallback only")
    original = _backend.kernels

    results: dict[str, dict[str, float]] = {name: {} for name in CASES}
    try:
        for backend_name, module in backends.items():
            _backend.kernels = module
            for case, fn in CASES.items():
                results[case][backend_name] = time_case(fn)
    finally:
        _backend.kernels = original

    width = max(len(c) for c in CASES)
    cols = list(backends)
    header = f"{'case':<{width}}  " + "  ".join(f"{c:>12}" for c in cols)
    if len(cols) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for case, timings in results.items():
        row = f"{case:<{width}}  " + "  ".join(
            f"{timings[c] * 1e3:>9.2f} ms" for c in cols
        )
        if len(cols) == 2:
            row += f"  {timings['python'] / timings['compiled']:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
