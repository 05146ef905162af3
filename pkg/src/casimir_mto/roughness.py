"""Surface-roughness averaging of forces and pressures.

Rough surfaces make the local separation a random variable. Topography
maps of the two facing surfaces are reduced to a discrete distribution of
separation offsets (the height deficits of the two surfaces add), and
forces are averaged as

    P(z) = sum_i w_i P(z + offset_i),      F(z) = sum_i w_i F(z + offset_i).

The distribution is zero-mean by construction; the separate mean contact
offset delta0 lives in the geometry, matching how calibration reports it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError, ValidationError
from .lifshitz import LifshitzResult, force_sphere_plane, pressure_plane_plane

WEIGHT_SUM_TOL = 1e-12
# Above this many exact pairwise sums, fall back to gridded convolution.
_EXACT_PAIR_BUDGET = 1 << 16


@dataclass(frozen=True)
class RoughnessDistribution:
    """Discrete separation-offset distribution: offsets (m) and weights."""

    offsets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        off = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "weights", w)
        if off.size == 0:
            raise ValidationError("distribution needs at least one entry")
        if off.shape != w.shape:
            raise ValidationError("offsets and weights must match in length")
        if not np.all(np.isfinite(off)):
            raise ValidationError("offsets must be finite")
        if np.any(w < 0):
            raise ValidationError("weights must be non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, not 1")

    @classmethod
    def single(cls, offset: float = 0.0) -> "RoughnessDistribution":
        return cls(np.array([offset]), np.array([1.0]))

    @property
    def n_entries(self) -> int:
        return int(self.offsets.size)

    def mean_offset(self) -> float:
        return float(np.dot(self.weights, self.offsets))


@dataclass(frozen=True)
class HeightMap:
    """Topography scan: 2-D height grid (m) with its pixel pitch (m)."""

    grid: np.ndarray
    pixel_pitch: float

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "grid", g)
        if g.size == 0:
            raise ValidationError("height map must be non-empty")
        if not np.all(np.isfinite(g)):
            raise ValidationError("heights must be finite")
        if not self.pixel_pitch > 0:
            raise ValidationError("pixel pitch must be > 0")


def load_heightmap(path) -> HeightMap:
    """Read a height map: whitespace-separated matrix of meters.

    Leading ``#`` comment lines carry metadata; one of them must define
    the pixel pitch, e.g. ``# pixel_pitch_m = 2.0e-7``.
    """
    path = Path(path)
    pitch = None
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    if key.strip() == "pixel_pitch_m":
                        try:
                            pitch = float(val)
                        except ValueError:
                            raise ParseError(f"bad pixel_pitch_m value {val!r}", line=lineno) from None
                continue
            try:
                rows.append([float(tok) for tok in line.split()])
            except ValueError:
                raise ParseError(f"non-numeric height in {line!r}", line=lineno) from None
    if pitch is None:
        raise ParseError("missing '# pixel_pitch_m = ...' header", line=1)
    if not rows:
        raise ValidationError(f"{path}: no height rows")
    width = len(rows[0])
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ParseError(f"row has {len(r)} columns, expected {width}", line=i)
    return HeightMap(np.array(rows), pitch)


def _value_distribution(values: np.ndarray):
    """Unique values with relative frequencies."""
    vals, counts = np.unique(values.ravel(), return_counts=True)
    return vals, counts / counts.sum()


def _gridded(values, probs, pitch, lo):
    """Re-express a discrete distribution on a uniform grid of given pitch."""
    idx = np.rint((values - lo) / pitch).astype(int)
    n = idx.max() + 1
    w = np.zeros(n)
    np.add.at(w, idx, probs)
    return w


def weights_from_heightmaps(
    surface1: HeightMap,
    surface2: HeightMap | None = None,
    bins: int = 21,
) -> RoughnessDistribution:
    """Separation-offset distribution from one or two topography maps.

    The offset variable is the sum of the two surfaces' heights (deficits
    add across the gap); its distribution is the convolution of the two
    independent per-surface height distributions. With ``surface2=None``
    the single map is treated as the already-combined profile.

    When the offset variable takes at most ``bins`` distinct values the
    exact discrete distribution is returned (flat and stepped surfaces
    stay exact); otherwise it is histogrammed into ``bins`` midpoint-
    centered entries. The result is shifted to zero mean.
    """
    if bins < 1:
        raise DomainError("bins must be >= 1")
    v1, p1 = _value_distribution(surface1.grid)
    if surface2 is None:
        sums, probs = v1, p1
    else:
        v2, p2 = _value_distribution(surface2.grid)
        if v1.size * v2.size <= _EXACT_PAIR_BUDGET:
            pair = v1[:, None] + v2[None, :]
            wts = p1[:, None] * p2[None, :]
            sums, inv = np.unique(pair.ravel(), return_inverse=True)
            probs = np.zeros(sums.size)
            np.add.at(probs, inv, wts.ravel())
        else:
            # Convolve on a shared uniform grid.
            span = (v1[-1] - v1[0]) + (v2[-1] - v2[0])
            pitch = max(span, 1e-30) / (16 * bins)
            w1 = _gridded(v1, p1, pitch, v1[0])
            w2 = _gridded(v2, p2, pitch, v2[0])
            probs = np.convolve(w1, w2)
            sums = v1[0] + v2[0] + pitch * np.arange(probs.size)
            keep = probs > 0
            sums, probs = sums[keep], probs[keep]

    if sums.size > bins:
        hist, edges = np.histogram(sums, bins=bins, weights=probs)
        mids = 0.5 * (edges[:-1] + edges[1:])
        keep = hist > 0
        sums, probs = mids[keep], hist[keep]

    probs = probs / probs.sum()
    sums = sums - np.dot(probs, sums)
    return RoughnessDistribution(sums, probs)


def _check_shifts(z: float, dist: RoughnessDistribution) -> np.ndarray:
    shifted = z + dist.offsets
    bad = np.nonzero(shifted <= 0)[0]
    if bad.size:
        i = int(bad[0])
        raise DomainError(
            f"entry {i} (offset {dist.offsets[i]:.3e} m) shifts separation "
            f"to {shifted[i]:.3e} m <= 0"
        )
    return shifted


def _canonical_order(dist: RoughnessDistribution) -> np.ndarray:
    # Fixed summation order makes the average invariant under entry
    # permutation or weight splitting, bit for bit.
    return np.lexsort((dist.weights, dist.offsets))


def averaged_pressure(z: float, dist: RoughnessDistribution, m1, m2,
                      tol: float = 1e-6) -> LifshitzResult:
    """Roughness-averaged two-plane pressure: sum_i w_i P(z + offset_i)."""
    shifted = _check_shifts(z, dist)
    value = 0.0
    evals = 0
    rel = 0.0
    for i in _canonical_order(dist):
        r = pressure_plane_plane(float(shifted[i]), m1, m2, tol=tol)
        value += dist.weights[i] * r.value
        evals += r.evaluations
        rel = max(rel, r.est_rel_error)
    return LifshitzResult(value, rel, evals)


def averaged_force(z: float, radius: float, dist: RoughnessDistribution,
                   m1, m2, tol: float = 1e-6) -> LifshitzResult:
    """Roughness-averaged sphere-plane force: sum_i w_i F(z + offset_i)."""
    shifted = _check_shifts(z, dist)
    value = 0.0
    evals = 0
    rel = 0.0
    for i in _canonical_order(dist):
        r = force_sphere_plane(float(shifted[i]), radius, m1, m2, tol=tol)
        value += dist.weights[i] * r.value
        evals += r.evaluations
        rel = max(rel, r.est_rel_error)
    return LifshitzResult(value, rel, evals)
