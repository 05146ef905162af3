import math
import warnings

import numpy as np
import pytest

from casimir_mto.constants import CODATA
from casimir_mto.errors import DomainError
from casimir_mto.lifshitz import (
    SpherePlaneGeometry,
    force_gradient_sphere_plane,
    force_sphere_plane,
    ideal_force_sphere_plane,
    ideal_pressure_plane_plane,
    pressure_plane_plane,
)

R_SPHERE = 294.3e-6


class TestIdealClosedForms:
    def test_pressure_formula(self):
        # -pi^2 hbar c / 240 z^4, evaluated directly
        want = -math.pi**2 * CODATA.hbar * CODATA.c / 240e-24
        assert ideal_pressure_plane_plane(1e-6) == pytest.approx(want, rel=1e-15)
        assert ideal_pressure_plane_plane(1e-6) == pytest.approx(-1.3001258e-3, rel=1e-7)

    def test_force_formula(self):
        want = -math.pi**3 * CODATA.hbar * CODATA.c * R_SPHERE / 360e-18
        assert ideal_force_sphere_plane(1e-6, R_SPHERE) == pytest.approx(want, rel=1e-15)
        assert ideal_force_sphere_plane(1e-6, R_SPHERE) == pytest.approx(-8.0137215e-13, rel=1e-7)
        assert ideal_force_sphere_plane(0.2e-6, R_SPHERE) == pytest.approx(-1.0017152e-10, rel=1e-7)

    def test_scalings(self):
        assert ideal_force_sphere_plane(1e-6, 2 * R_SPHERE) == pytest.approx(
            2 * ideal_force_sphere_plane(1e-6, R_SPHERE), rel=1e-14
        )
        assert ideal_force_sphere_plane(2e-6, R_SPHERE) == pytest.approx(
            ideal_force_sphere_plane(1e-6, R_SPHERE) / 8, rel=1e-14
        )
        assert ideal_pressure_plane_plane(0.5e-6) == pytest.approx(
            16 * ideal_pressure_plane_plane(1e-6), rel=1e-14
        )

    def test_pft_consistency_of_closed_forms(self):
        # d(ideal force)/dz / (2 pi R) equals the ideal pressure.
        z, h = 1e-6, 1e-10
        deriv = (
            ideal_force_sphere_plane(z + h, R_SPHERE)
            - ideal_force_sphere_plane(z - h, R_SPHERE)
        ) / (2 * h)
        assert deriv / (2 * math.pi * R_SPHERE) == pytest.approx(
            abs(ideal_pressure_plane_plane(z)), rel=1e-6
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            ideal_pressure_plane_plane(0.0)
        with pytest.raises(DomainError):
            ideal_force_sphere_plane(1e-6, 0.0)


class TestQuadratureAgainstIdealLimit:
    @pytest.mark.parametrize("z", [0.2e-6, 1e-6, 2e-6])
    def test_pressure(self, z, ideal):
        res = pressure_plane_plane(z, ideal, ideal, tol=1e-6)
        assert res.value == pytest.approx(ideal_pressure_plane_plane(z), rel=1e-6)
        assert res.value < 0
        assert res.est_rel_error <= 1e-6

    @pytest.mark.parametrize("z", [0.2e-6, 1e-6])
    def test_force(self, z, ideal):
        res = force_sphere_plane(z, R_SPHERE, ideal, ideal, tol=1e-6)
        assert res.value == pytest.approx(ideal_force_sphere_plane(z, R_SPHERE), rel=1e-6)
        assert res.value < 0

    def test_gradient_closed_form(self, ideal):
        res = force_gradient_sphere_plane(1e-6, R_SPHERE, ideal, ideal, tol=1e-6)
        want = 2 * math.pi * R_SPHERE * abs(ideal_pressure_plane_plane(1e-6))
        assert res.value == pytest.approx(want, rel=1e-6)
        assert res.value > 0


class TestRealMetals:
    def test_material_order_symmetry(self, gold_drude, copper_drude):
        a = pressure_plane_plane(0.5e-6, gold_drude, copper_drude, tol=1e-6)
        b = pressure_plane_plane(0.5e-6, copper_drude, gold_drude, tol=1e-6)
        assert a.value == b.value  # reflection products commute exactly

    def test_finite_conductivity_reduces_attraction(self, gold_drude, copper_drude, ideal):
        for z in (0.2e-6, 0.5e-6, 2e-6):
            drude = pressure_plane_plane(z, gold_drude, copper_drude, tol=1e-6)
            assert abs(drude.value) < abs(ideal_pressure_plane_plane(z))

    def test_ratio_to_ideal_grows_with_separation(self, gold_drude, copper_drude):
        ratios = []
        for z in (0.2e-6, 0.7e-6, 2e-6):
            drude = pressure_plane_plane(z, gold_drude, copper_drude, tol=1e-6)
            ratios.append(abs(drude.value) / abs(ideal_pressure_plane_plane(z)))
        assert ratios[0] < ratios[1] < ratios[2] < 1.0

    def test_monotone_decrease_in_separation(self, gold_drude, copper_drude):
        grid = np.linspace(0.2e-6, 1.4e-6, 5)
        forces = [
            abs(force_sphere_plane(float(z), R_SPHERE, gold_drude, copper_drude, tol=1e-6).value)
            for z in grid
        ]
        assert all(a > b for a, b in zip(forces, forces[1:]))

    def test_pft_identity_five_point(self, gold_drude, copper_drude):
        """Central-difference force derivative vs 2 pi R * pressure."""
        z = 0.5e-6
        h = 0.005 * z
        stencil = [
            (z - 2 * h, 1.0), (z - h, -8.0), (z + h, 8.0), (z + 2 * h, -1.0)
        ]
        deriv = sum(
            c * force_sphere_plane(zi, R_SPHERE, gold_drude, copper_drude, tol=1e-8).value
            for zi, c in stencil
        ) / (12 * h)
        grad = force_gradient_sphere_plane(z, R_SPHERE, gold_drude, copper_drude, tol=1e-8)
        assert deriv == pytest.approx(grad.value, rel=1e-3)

    def test_force_against_nested_scipy_oracle(self, gold_drude, copper_drude):
        """Whole double integral vs an independent nested-quadrature route."""
        from scipy.integrate import quad

        from casimir_mto.constants import CODATA, HBARC_EV_M

        z = 0.5e-6
        e_scale = HBARC_EV_M / (2 * z)

        def inner(u):
            e1 = gold_drude.eps(max(u * e_scale, 1e-5))
            e2 = copper_drude.eps(max(u * e_scale, 1e-5))

            def f(p):
                s1 = math.sqrt(e1 - 1 + p * p)
                s2 = math.sqrt(e2 - 1 + p * p)
                w = math.exp(-p * u)
                if w == 0.0:
                    return 0.0
                qte = (e1 - 1) / (s1 + p) ** 2 * (e2 - 1) / (s2 + p) ** 2 * w
                qtm = (
                    (e1 - 1) * (p * p * (e1 + 1) - 1) / (e1 * p + s1) ** 2
                    * (e2 - 1) * (p * p * (e2 + 1) - 1) / (e2 * p + s2) ** 2
                    * w
                )
                return p * (math.log1p(-qte) + math.log1p(-qtm))

            val, _ = quad(f, 1, max(300 / u, 2.0), limit=400)
            return u * u * val

        outer, _ = quad(inner, 0, 60, limit=400)
        want = CODATA.hbar * CODATA.c * R_SPHERE / (16 * math.pi * z**3) * outer
        got = force_sphere_plane(z, R_SPHERE, gold_drude, copper_drude, tol=1e-7)
        assert got.value == pytest.approx(want, rel=1e-5)

    def test_mixed_ideal_metal_pair(self, gold_drude, ideal):
        res = pressure_plane_plane(0.5e-6, gold_drude, ideal, tol=1e-6)
        drude_pair = pressure_plane_plane(0.5e-6, gold_drude, gold_drude, tol=1e-6)
        assert abs(drude_pair.value) < abs(res.value) < abs(ideal_pressure_plane_plane(0.5e-6))

    def test_tolerance_honesty(self, gold_drude, copper_drude):
        loose = pressure_plane_plane(0.5e-6, gold_drude, copper_drude, tol=4e-6)
        tight = pressure_plane_plane(0.5e-6, gold_drude, copper_drude, tol=2e-6)
        shift = abs(tight.value - loose.value) / abs(tight.value)
        assert shift < loose.est_rel_error
        assert loose.est_rel_error <= 4e-6

    def test_floor_insensitivity(self, gold_drude, copper_drude):
        a = pressure_plane_plane(0.5e-6, gold_drude, copper_drude, tol=1e-6, xi_floor_ev=1e-5)
        b = pressure_plane_plane(0.5e-6, gold_drude, copper_drude, tol=1e-6, xi_floor_ev=5e-6)
        assert abs(a.value - b.value) / abs(a.value) < 1e-6

    def test_tabulated_material_integrates(self):
        from casimir_mto.materials import load_registry

        registry = load_registry()
        res = pressure_plane_plane(0.5e-6, registry["gold"], registry["copper"], tol=1e-6)
        assert res.value < 0
        # Interband absorption strengthens eps over pure Drude.
        drude = pressure_plane_plane(
            0.5e-6, registry["gold_drude"], registry["copper_drude"], tol=1e-6
        )
        assert abs(res.value) > abs(drude.value)
        assert abs(res.value) < abs(ideal_pressure_plane_plane(0.5e-6))


class TestContracts:
    def test_tolerance_window(self, ideal):
        with pytest.raises(DomainError):
            pressure_plane_plane(1e-6, ideal, ideal, tol=1e-9)
        with pytest.raises(DomainError):
            pressure_plane_plane(1e-6, ideal, ideal, tol=1e-2)

    def test_separation_positive(self, ideal):
        with pytest.raises(DomainError):
            pressure_plane_plane(0.0, ideal, ideal)
        with pytest.raises(DomainError):
            force_sphere_plane(1e-6, -1.0, ideal, ideal)

    def test_not_a_model(self):
        with pytest.raises(DomainError):
            pressure_plane_plane(1e-6, object(), object())

    def test_geometry_validation(self):
        with pytest.raises(DomainError):
            SpherePlaneGeometry(radius=-1.0, separation=1e-6)
        with pytest.raises(DomainError):
            SpherePlaneGeometry(radius=1e-4, separation=0.0)
        with pytest.raises(DomainError):
            SpherePlaneGeometry(radius=1e-4, separation=1e-6, delta0=-1e-9)
        with pytest.warns(UserWarning):
            SpherePlaneGeometry(radius=1e-4, separation=2e-5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            SpherePlaneGeometry(radius=294.3e-6, separation=1e-6, delta0=39.4e-9)

    def test_result_evaluation_count(self, ideal):
        res = pressure_plane_plane(1e-6, ideal, ideal, tol=1e-6)
        assert res.evaluations > 1000

    def test_budget_exhaustion_carries_partial_result(self):
        from casimir_mto.errors import ConvergenceError

        # A pathological "material" oscillating too fast for any panel
        # budget; the partial result must still come back scaled.
        noisy = lambda xi: 2.0 + math.sin(3e9 * xi)
        with pytest.raises(ConvergenceError) as exc_info:
            pressure_plane_plane(1e-6, noisy, noisy, tol=1e-6)
        partial = exc_info.value.partial
        assert partial is not None
        assert partial.value < 0
        assert abs(partial.value) < abs(ideal_pressure_plane_plane(1e-6))
