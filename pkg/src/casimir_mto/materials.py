"""Dielectric permittivity on the imaginary frequency axis.

Metals are described by their loss spectrum eps''(omega) (tabulated
optical data over the measured range, extended to low energy with a Drude
free-electron tail). The force integrals need eps(i xi), obtained through
the dispersion relation

    eps(i xi) = 1 + (2/pi) * integral_0^inf  omega eps''(omega)
                                             / (omega^2 + xi^2)  d omega.

Everything in this module works in photon energies (eV); the conversion
to angular frequency happens once, at the force-integral boundary
(1 eV = 1.519e15 rad/s).

The bundled Au/Cu tables are synthetic Drude + interband-oscillator
spectra shaped like noble-metal data. They are placeholders so the
pipeline runs out of the box: replace them with measured optical
constants for quantitative work. The default Drude parameters
(Au: 9.0/0.035 eV, Cu: 8.9/0.030 eV) are conventional literature values,
shipped as editable registry entries.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    ConfigurationError,
    DomainError,
    ParseError,
    ValidationError,
)
from .numerics import adaptive_quadrature, geometric_edges

SPLICE_TOL = 1e-2          # allowed relative jump of eps'' at the splice
_DISPERSION_RTOL = 1e-7    # adaptive-quadrature target for smooth segments
_TAIL_CUTOFF_EV = 1e5      # beyond this, the pure 1/omega^3 tail is analytic


@dataclass(frozen=True)
class DrudeParams:
    """Free-electron parameters: plasma and relaxation energies in eV."""

    plasma_ev: float
    relaxation_ev: float

    def __post_init__(self):
        if not self.plasma_ev > 0:
            raise ValidationError("plasma energy must be > 0")
        if not self.relaxation_ev > 0:
            raise ValidationError("relaxation energy must be > 0")


def drude_eps(xi_ev, params: DrudeParams):
    """Drude permittivity on the imaginary axis: 1 + wp^2/(xi (xi + gamma)).

    Accepts a scalar or array ``xi_ev`` (eV), all entries > 0.
    """
    xi = np.asarray(xi_ev, dtype=float)
    if np.any(xi <= 0):
        raise DomainError("imaginary frequency must be > 0")
    out = 1.0 + params.plasma_ev**2 / (xi * (xi + params.relaxation_ev))
    return float(out) if np.isscalar(xi_ev) else out


def drude_eps2(omega_ev, params: DrudeParams):
    """Drude loss spectrum on the real axis: wp^2 gamma / (w (w^2 + gamma^2))."""
    w = np.asarray(omega_ev, dtype=float)
    if np.any(w <= 0):
        raise DomainError("photon energy must be > 0")
    out = params.plasma_ev**2 * params.relaxation_ev / (w * (w**2 + params.relaxation_ev**2))
    return float(out) if np.isscalar(omega_ev) else out


@dataclass(frozen=True)
class OpticalTable:
    """Tabulated loss spectrum eps''(omega) over a measured energy range.

    Energies must be strictly increasing and positive, eps'' non-negative.
    """

    energy_ev: np.ndarray
    eps2: np.ndarray
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.energy_ev, dtype=float)
        y = np.asarray(self.eps2, dtype=float)
        object.__setattr__(self, "energy_ev", e)
        object.__setattr__(self, "eps2", y)
        if e.shape != y.shape or e.ndim != 1:
            raise ValidationError("energy and eps2 columns must be 1-D and equal length")
        if e.size:
            if not np.all(e > 0):
                raise ValidationError("photon energies must be > 0")
            if not np.all(np.diff(e) > 0):
                raise ValidationError("photon energies must be strictly increasing")
            if not np.all(y >= 0):
                raise ValidationError("eps'' must be non-negative")

    @property
    def n_rows(self) -> int:
        return int(self.energy_ev.size)

    @property
    def energy_range(self) -> tuple[float, float]:
        if not self.n_rows:
            raise ValidationError("empty table has no energy range")
        return float(self.energy_ev[0]), float(self.energy_ev[-1])

    def eps2_at(self, omega_ev: float) -> float:
        lo, hi = self.energy_range
        if not lo <= omega_ev <= hi:
            raise DomainError(f"{omega_ev} eV outside tabulated range [{lo}, {hi}]")
        return float(np.interp(omega_ev, self.energy_ev, self.eps2))


def load_optical_data(path, fmt: str = "csv") -> OpticalTable:
    """Read a loss-spectrum table: UTF-8 CSV with header ``energy_ev,eps2``."""
    if fmt != "csv":
        raise ConfigurationError(f"unsupported optical-data format {fmt!r}")
    path = Path(path)
    energies: list[float] = []
    values: list[float] = []
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                cols = [c.strip().lower() for c in line.split(",")]
                if cols != ["energy_ev", "eps2"]:
                    raise ParseError(
                        f"expected header 'energy_ev,eps2', got {line!r}", line=lineno
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError(f"expected 2 comma-separated fields, got {len(parts)}", line=lineno)
            try:
                e, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise ParseError(f"non-numeric field in {line!r}", line=lineno) from None
            energies.append(e)
            values.append(y)
    if not header_seen:
        raise ParseError("missing 'energy_ev,eps2' header", line=1)
    if not energies:
        raise ValidationError(f"{path}: no data rows")
    return OpticalTable(np.array(energies), np.array(values), label=str(path))


def _dispersion_drude_segment(drude: DrudeParams, xi: float, hi: float) -> float:
    """Numeric integral of the Drude loss over [0, hi] against the KK kernel."""
    wp2g = drude.plasma_ev**2 * drude.relaxation_ev
    g2 = drude.relaxation_ev**2
    x2 = xi * xi

    def f(w):
        return wp2g / ((w * w + g2) * (w * w + x2))

    lo = min(drude.relaxation_ev, xi, hi) / 16.0
    edges = [0.0] + geometric_edges(lo, hi) if lo < hi else [0.0, hi]
    return adaptive_quadrature(f, edges, rel_tol=_DISPERSION_RTOL).value


def _dispersion_tail(a3: float, xi: float, hi: float) -> float:
    """Integral of a3/omega^3 over [hi, inf) against the KK kernel.

    a3 continues the table as eps'' = a3 / omega^3. Stable for xi << hi.
    """
    if a3 == 0.0:
        return 0.0
    x = xi / hi
    if x < 1e-3:
        return a3 * (1.0 / (3 * hi**3) - xi**2 / (5 * hi**5) + xi**4 / (7 * hi**7))
    return (a3 / xi**2) * (1.0 / hi - math.atan(x) / xi)


def _dispersion_table(table: OpticalTable, xi: float, splice_ev: float) -> float:
    """Trapezoid of the tabulated loss against the KK kernel, from the splice up."""
    e = table.energy_ev
    y = table.eps2
    if splice_ev > e[0]:
        i = int(np.searchsorted(e, splice_ev))
        ys = np.interp(splice_ev, e, y)
        e = np.concatenate([[splice_ev], e[i:]])
        y = np.concatenate([[ys], y[i:]])
    f = e * y / (e * e + xi * xi)
    return float(np.trapezoid(f, e))


def kk_to_imaginary_axis(
    table: OpticalTable | None,
    drude: DrudeParams,
    xi_ev: float,
    splice_ev: float | None = None,
) -> float:
    """Dispersion transform of the composite loss spectrum to eps(i xi).

    The Drude tail covers [0, splice]; the table covers [splice, E_max];
    beyond the table the loss is continued as eps'' ~ 1/omega^3 matched at
    the last row. ``table=None`` selects a pure-Drude spectrum over the
    whole axis (the table-free configuration).

    Raises ConfigurationError for a zero-row table, DomainError for
    xi <= 0.
    """
    if xi_ev <= 0:
        raise DomainError("imaginary frequency must be > 0")
    if table is None:
        hi = _TAIL_CUTOFF_EV
        seg = _dispersion_drude_segment(drude, xi_ev, hi)
        a3 = drude.plasma_ev**2 * drude.relaxation_ev * hi**2 / (hi**2 + drude.relaxation_ev**2)
        tail = _dispersion_tail(a3, xi_ev, hi)
        return 1.0 + (2.0 / math.pi) * (seg + tail)
    if table.n_rows == 0:
        raise ConfigurationError("optical table has no rows")
    lo, hi = table.energy_range
    if splice_ev is None:
        splice_ev = lo
    if not lo <= splice_ev <= hi:
        raise ConfigurationError(
            f"splice energy {splice_ev} eV outside tabulated range [{lo}, {hi}]"
        )
    seg = _dispersion_drude_segment(drude, xi_ev, splice_ev)
    tab = _dispersion_table(table, xi_ev, splice_ev)
    a3 = table.eps2[-1] * hi**3
    tail = _dispersion_tail(float(a3), xi_ev, hi)
    return 1.0 + (2.0 / math.pi) * (seg + tab + tail)


def drude_eps_via_dispersion(params: DrudeParams, xi_ev: float) -> float:
    """Numeric dispersion integral of the analytic Drude loss.

    Independent route to the closed-form ``drude_eps``; used to
    cross-check the quadrature machinery.
    """
    return kk_to_imaginary_axis(None, params, xi_ev)


class DielectricModel:
    """A metal's permittivity evaluated on the imaginary frequency axis."""

    is_ideal = False
    label = ""

    def eps(self, xi_ev: float) -> float:
        raise NotImplementedError


class PerfectConductor(DielectricModel):
    """Ideal-metal marker: reflection coefficients are taken at their
    infinite-permittivity limit inside the force integrals, so there is no
    finite eps to evaluate."""

    is_ideal = True

    def __init__(self, label: str = "ideal"):
        self.label = label

    def eps(self, xi_ev: float) -> float:
        raise DomainError(
            "perfect conductor has no finite permittivity; "
            "force integrals treat it as the ideal limit"
        )


class DrudeOnly(DielectricModel):
    """Free-electron metal with the closed-form Drude eps(i xi)."""

    def __init__(self, params: DrudeParams, label: str = ""):
        self.params = params
        self.label = label or f"drude({params.plasma_ev}/{params.relaxation_ev} eV)"

    def eps(self, xi_ev: float) -> float:
        return float(drude_eps(xi_ev, self.params))


class Tabulated(DielectricModel):
    """Tabulated loss spectrum spliced onto a Drude low-energy tail.

    ``splice_ev`` defaults to the lowest tabulated energy. Construction
    verifies that the Drude and tabulated loss agree at the splice to
    within SPLICE_TOL.
    """

    def __init__(
        self,
        table: OpticalTable,
        drude: DrudeParams,
        splice_ev: float | None = None,
        label: str = "",
    ):
        if table.n_rows == 0:
            raise ConfigurationError("optical table has no rows")
        lo, hi = table.energy_range
        self.table = table
        self.drude = drude
        self.splice_ev = lo if splice_ev is None else float(splice_ev)
        if not lo <= self.splice_ev <= hi:
            raise ConfigurationError(
                f"splice energy {self.splice_ev} eV outside tabulated range [{lo}, {hi}]"
            )
        self.label = label or table.label
        mismatch = self.splice_mismatch()
        if mismatch > SPLICE_TOL:
            raise ValidationError(
                f"eps'' jumps by {mismatch:.1%} at the splice "
                f"({self.splice_ev} eV); check Drude parameters vs. table"
            )
        self._sampler: SampledDielectric | None = None
        self._sampler_lock = threading.Lock()

    def splice_mismatch(self) -> float:
        """Relative eps'' discontinuity where the Drude tail meets the table."""
        d = float(drude_eps2(self.splice_ev, self.drude))
        t = self.table.eps2_at(self.splice_ev)
        return abs(d - t) / max(0.5 * (d + t), 1e-300)

    def eps(self, xi_ev: float) -> float:
        return kk_to_imaginary_axis(self.table, self.drude, xi_ev, self.splice_ev)

    def sampled(self) -> "SampledDielectric":
        """Cached fast interpolant of eps(i xi) (built on first use).

        Thread-safe: concurrent grid workers share one build.
        """
        if self._sampler is None:
            with self._sampler_lock:
                if self._sampler is None:
                    self._sampler = SampledDielectric.from_model(self)
        return self._sampler


class SampledDielectric(DielectricModel):
    """Monotone log-log interpolant of eps(i xi) - 1.

    Exact models cost a dispersion integral per evaluation; the force
    integrals query eps hundreds of times per separation, so pipelines
    evaluate through this interpolant. Power-law extrapolation beyond the
    sampled range keeps eps >= 1 and non-increasing everywhere.
    """

    def __init__(self, xi_ev: np.ndarray, eps: np.ndarray, label: str = ""):
        xi = np.asarray(xi_ev, dtype=float)
        e = np.asarray(eps, dtype=float)
        if np.any(e <= 1.0):
            raise ValidationError("sampled eps must exceed 1")
        self._lx = np.log(xi)
        self._ly = np.log(e - 1.0)
        self._interp = PchipInterpolator(self._lx, self._ly, extrapolate=False)
        self._lo, self._hi = float(xi[0]), float(xi[-1])
        self._slope_lo = (self._ly[1] - self._ly[0]) / (self._lx[1] - self._lx[0])
        self._slope_hi = (self._ly[-1] - self._ly[-2]) / (self._lx[-1] - self._lx[-2])
        self.label = label

    @classmethod
    def from_model(
        cls,
        model: DielectricModel,
        lo_ev: float = 1e-6,
        hi_ev: float = 1e4,
        per_decade: int = 48,
    ) -> "SampledDielectric":
        n = max(int(per_decade * math.log10(hi_ev / lo_ev)), 16)
        xi = np.geomspace(lo_ev, hi_ev, n)
        eps = np.array([model.eps(x) for x in xi])
        return cls(xi, eps, label=model.label)

    def eps(self, xi_ev: float) -> float:
        lx = math.log(min(max(xi_ev, 1e-300), 1e300))
        if xi_ev <= 0:
            raise DomainError("imaginary frequency must be > 0")
        if xi_ev < self._lo:
            return 1.0 + math.exp(self._ly[0] + self._slope_lo * (lx - self._lx[0]))
        if xi_ev > self._hi:
            return 1.0 + math.exp(self._ly[-1] + self._slope_hi * (lx - self._lx[-1]))
        return 1.0 + math.exp(float(self._interp(lx)))


def data_dir() -> Path:
    """Directory holding the bundled registry and tables."""
    return Path(resources.files("casimir_mto").joinpath("data"))


def default_registry_path() -> Path:
    env = os.environ.get("CASIMIR_DATA_DIR")
    if env:
        return Path(env) / "materials.json"
    return data_dir() / "materials.json"


_REGISTRY_KEYS = {"variant", "plasma_ev", "relaxation_ev", "table", "splice_ev", "label"}


def load_registry(path: str | Path | None = None) -> dict[str, DielectricModel]:
    """Build dielectric models from a materials registry document.

    JSON object mapping material names to entries with a ``variant`` of
    ``perfect_conductor``, ``drude`` or ``tabulated``; table paths resolve
    relative to the registry file. Unknown keys are rejected.
    """
    reg_path = Path(path) if path is not None else default_registry_path()
    try:
        with open(reg_path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{reg_path}: {exc}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{reg_path}: registry must be a JSON object")
    models: dict[str, DielectricModel] = {}
    for name, entry in doc.items():
        if not isinstance(entry, dict):
            raise ConfigurationError(f"material {name!r}: entry must be an object")
        unknown = set(entry) - _REGISTRY_KEYS
        if unknown:
            raise ConfigurationError(
                f"material {name!r}: unknown keys {sorted(unknown)}"
            )
        variant = entry.get("variant")
        label = entry.get("label", name)
        if variant == "perfect_conductor":
            models[name] = PerfectConductor(label=label)
            continue
        try:
            drude = DrudeParams(float(entry["plasma_ev"]), float(entry["relaxation_ev"]))
        except KeyError as exc:
            raise ConfigurationError(f"material {name!r}: missing {exc}") from None
        if variant == "drude":
            models[name] = DrudeOnly(drude, label=label)
        elif variant == "tabulated":
            if "table" not in entry:
                raise ConfigurationError(f"material {name!r}: missing 'table'")
            table = load_optical_data(reg_path.parent / entry["table"])
            models[name] = Tabulated(
                table, drude, splice_ev=entry.get("splice_ev"), label=label
            )
        else:
            raise ConfigurationError(
                f"material {name!r}: unknown variant {variant!r} "
                "(expected perfect_conductor, drude or tabulated)"
            )
    return models
