"""Casimir-force pipeline for a sphere-plane torsional-oscillator experiment.

Subpackages by physics stage:

- materials: dielectric models eps(i xi) from tabulated data + Drude tails
- lifshitz: zero-temperature force/pressure integrals and ideal closed forms
- roughness: separation distributions from topography, averaged forces
- electrostatics: exact sphere-plane force series and system calibration
- oscillator: torsional-oscillator forward/inverse model, sweep simulation
- yukawa: hypothetical short-range force and exclusion limits
- cli: batch command-line interface over all of the above

The hot quadrature kernels run compiled when the extension built; check
``backend_name()``.
"""

from ._backend import available_backends, backend_name
from .constants import CODATA, PhysicalConstants

__version__ = "0.1.0"

__all__ = [
    "CODATA",
    "PhysicalConstants",
    "available_backends",
    "backend_name",
    "__version__",
]
