"""Correlation kernels against integral representations and closed forms.

Each family is cross-checked through a route independent of its
implementation: spectral-projection integrals, elementary half-integer
reductions, semigroup composition, and one-particle transition densities.
"""

import csv
import math
import warnings

import numpy as np
import pytest

from detproc import kernels, specfun
from detproc.configuration import Configuration
from detproc.errors import (
    DomainError,
    UnsupportedConfigurationError,
    ValidationError,
)
from detproc.quadrature import gauss_legendre, gauss_legendre_panels


class TestSineKernel:
    def test_diagonal_and_known_value(self):
        assert kernels.sine_kernel(0.7, 0.7) == 1.0
        assert math.isclose(
            float(kernels.sine_kernel(0.0, 0.5)), 2.0 / math.pi, rel_tol=1e-15
        )

    def test_translation_invariance_and_symmetry(self):
        xs = np.linspace(-2.0, 2.0, 7)
        base = kernels.sine_kernel(xs, xs)
        shifted = kernels.sine_kernel(xs + 3.3, xs + 3.3)
        np.testing.assert_allclose(base, shifted, atol=1e-14)
        np.testing.assert_allclose(base, base.T, atol=0.0)

    def test_near_diagonal_continuity(self):
        a = float(kernels.sine_kernel(0.4, 0.4))
        b = float(kernels.sine_kernel(0.4, 0.4 + 1e-12))
        assert abs(a - b) < 1e-10


class TestAiryKernel:
    def test_matches_projection_integral(self):
        # the kernel must equal the one-sided overlap integral
        # int_0^inf Ai(x+a) Ai(y+a) da
        a, wa = gauss_legendre_panels(np.linspace(0.0, 16.0, 33), 16)
        for x, y in [(-1.2, 0.4), (0.0, 0.0), (1.3, 2.0), (-2.0, -2.0)]:
            integral = float(wa @ (specfun.airy(x + a) * specfun.airy(y + a)))
            assert math.isclose(
                float(kernels.airy_kernel(x, y)), integral, rel_tol=1e-11
            )

    def test_diagonal_is_the_density(self):
        xs = np.linspace(-3.0, 2.0, 11)
        diag = np.array([float(kernels.airy_kernel(v, v)) for v in xs])
        np.testing.assert_allclose(diag, kernels.airy_density(xs), rtol=1e-13)

    def test_near_diagonal_continuity(self):
        a = float(kernels.airy_kernel(-1.1, -1.1))
        b = float(kernels.airy_kernel(-1.1, -1.1 + 1e-8))
        assert abs(a - b) < 1e-6


class TestBesselKernel:
    def test_half_integer_reduces_to_elementary_functions(self):
        for x, y in [(0.7, 2.3), (1.1, 1.9), (4.0, 0.2)]:
            u, v = 2.0 * math.sqrt(x), 2.0 * math.sqrt(y)
            expected = (
                math.sin(u - v) / (u - v) - math.sin(u + v) / (u + v)
            ) / (math.pi * (x * y) ** 0.25)
            assert math.isclose(
                float(kernels.bessel_kernel(0.5, x, y)), expected, rel_tol=1e-12
            )

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.7])
    def test_matches_projection_integral(self, nu):
        # K(x, y) = int_0^1 J(2 sqrt(ux)) J(2 sqrt(uy)) du, evaluated with
        # the u = w^2 substitution so fractional indices stay smooth
        w, ww = gauss_legendre(0.0, 1.0, 80)
        x, y = 0.8, 2.6
        integral = float(
            (2.0 * w * ww)
            @ (
                specfun.bessel_j(nu, 2.0 * w * math.sqrt(x))
                * specfun.bessel_j(nu, 2.0 * w * math.sqrt(y))
            )
        )
        assert math.isclose(
            float(kernels.bessel_kernel(nu, x, y)), integral, rel_tol=1e-11
        )

    def test_near_diagonal_continuity(self):
        for nu in (0.0, 0.5, 1.7):
            a = float(kernels.bessel_kernel(nu, 1.3, 1.3))
            b = float(kernels.bessel_kernel(nu, 1.3, 1.3 + 1e-7))
            assert abs(a - b) < 1e-6

    def test_hard_wall_values(self):
        assert float(kernels.bessel_kernel(0.0, 0.0, 0.0)) == 1.0
        assert float(kernels.bessel_kernel(0.5, 0.0, 0.0)) == 0.0

    def test_validation(self):
        with pytest.raises(DomainError):
            kernels.bessel_kernel(-1.2, 1.0, 1.0)
        with pytest.raises(DomainError):
            kernels.bessel_kernel(0.5, -0.1, 1.0)
        with pytest.raises(DomainError):
            kernels.bessel_kernel(-0.5, 0.0, 1.0)


class TestSummedSquareIdentity:
    @pytest.mark.parametrize("N", [1, 5, 40])
    def test_both_sides_agree(self, N):
        for x in (0.0, 0.8, 4.2):
            lhs, rhs = kernels.christoffel_darboux(N, x)
            assert math.isclose(lhs, rhs, rel_tol=1e-11)

    def test_small_case_by_hand(self):
        # N = 1: lhs = phi_0(x)^2
        lhs, _ = kernels.christoffel_darboux(1, 0.9)
        assert math.isclose(lhs, specfun.hermite_phi(0, 0.9) ** 2, rel_tol=1e-15)

    def test_validation(self):
        with pytest.raises(DomainError):
            kernels.christoffel_darboux(0, 1.0)


class TestFiniteKernels:
    def test_equal_time_diagonal_is_the_density(self):
        xs = np.linspace(-4.0, 4.0, 9)
        t = 0.9
        mat = kernels.finite_hermite_kernel(5, t, xs, t, xs)
        np.testing.assert_allclose(
            np.diag(mat), kernels.gue_density(5, t, xs), rtol=1e-12
        )

    def test_trace_equals_rank(self):
        xs, wxs = gauss_legendre_panels(np.linspace(-16.0, 16.0, 33), 16)
        mat = kernels.finite_hermite_kernel(4, 0.9, xs, 0.9, xs)
        assert math.isclose(float(wxs @ np.diag(mat)), 4.0, rel_tol=1e-12)

    def test_two_time_semigroup_composition(self):
        s, u, t = 0.4, 0.7, 1.1
        z, wz = gauss_legendre_panels(np.linspace(-14.0, 14.0, 29), 16)
        k1 = kernels.finite_hermite_kernel(3, s, np.array([0.3]), u, z)
        k2 = kernels.finite_hermite_kernel(3, u, z, t, np.array([-0.9]))
        comp = float(((k1 * wz) @ k2).item())
        direct = kernels.finite_hermite_kernel(
            3, s, np.array([0.3]), t, np.array([-0.9])
        ).item()
        assert math.isclose(comp, direct, rel_tol=1e-12)

    def test_rank_one_joint_density_is_markovian(self):
        # for a single particle started at the origin the 2x2 space-time
        # determinant must reproduce the product of heat transitions
        s, t, x, y = 0.5, 1.2, 0.6, -0.4
        k = lambda a, xv, b, yv: kernels.finite_hermite_kernel(
            1, a, np.array([xv]), b, np.array([yv])
        ).item()
        joint = k(s, x, s, x) * k(t, y, t, y) - k(s, x, t, y) * k(t, y, s, x)
        exact = specfun.heat_kernel_psin(s, 0.0, x) * specfun.heat_kernel_psin(
            t - s, x, y
        )
        assert math.isclose(joint, exact, rel_tol=1e-12)

    def test_laguerre_two_time_semigroup_composition(self):
        s, u, t = 0.4, 0.7, 1.1
        zq, wq = gauss_legendre_panels(np.linspace(0.0, math.sqrt(60.0), 25), 16)
        zz, wzz = zq * zq, 2.0 * zq * wq
        k1 = kernels.finite_laguerre_kernel(3, 0.5, s, np.array([0.9]), u, zz)
        k2 = kernels.finite_laguerre_kernel(3, 0.5, u, zz, t, np.array([2.2]))
        comp = float(((k1 * wzz) @ k2).item())
        direct = kernels.finite_laguerre_kernel(
            3, 0.5, s, np.array([0.9]), t, np.array([2.2])
        ).item()
        assert math.isclose(comp, direct, rel_tol=1e-9)

    def test_laguerre_rank_one_joint_density_is_markovian(self):
        s, t, x, y = 0.5, 1.2, 0.9, 2.1
        nu = 0.5
        k = lambda a, xv, b, yv: kernels.finite_laguerre_kernel(
            1, nu, a, np.array([xv]), b, np.array([yv])
        ).item()
        joint = k(s, x, s, x) * k(t, y, t, y) - k(s, x, t, y) * k(t, y, s, x)
        exact = specfun.bessel_transition(nu, s, 0.0, x) * specfun.bessel_transition(
            nu, t - s, x, y
        )
        assert math.isclose(joint, exact, rel_tol=1e-11)


class TestDensities:
    def test_rank_one_density_is_gaussian(self):
        xs = np.linspace(-3.0, 3.0, 13)
        t = 0.7
        expected = np.exp(-(xs**2) / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)
        np.testing.assert_allclose(kernels.gue_density(1, t, xs), expected, rtol=1e-13)

    def test_density_mass_equals_rank(self):
        xs, wxs = gauss_legendre_panels(np.linspace(-18.0, 18.0, 37), 16)
        total = float(wxs @ kernels.gue_density(6, 1.1, xs))
        assert math.isclose(total, 6.0, rel_tol=1e-12)

    def test_bulk_profile_support_and_shape(self):
        assert kernels.semicircle(4, 1.0, 0.0) == pytest.approx(
            math.sqrt(16.0) / (2.0 * math.pi)
        )
        assert kernels.semicircle(4, 1.0, 4.1) == 0.0
        assert kernels.semicircle(4, 1.0, -4.1) == 0.0

    def test_edge_profile_support_and_shape(self):
        N = 8
        assert kernels.semicircle_edge(N, 0.5) == 0.0
        assert kernels.semicircle_edge(N, -4.0 * N ** (2.0 / 3.0) - 0.1) == 0.0
        x = -1.0
        expected = math.sqrt(-x * (1.0 + x / (4.0 * N ** (2.0 / 3.0)))) / math.pi
        assert kernels.semicircle_edge(N, x) == pytest.approx(expected, rel=1e-15)

    def test_edge_recentred_density_definition(self):
        N = 27
        xs = np.linspace(-3.0, 2.0, 7)
        np.testing.assert_allclose(
            kernels.rho_A(N, xs),
            kernels.gue_density(N, N ** (1.0 / 3.0), 2.0 * N ** (2.0 / 3.0) + xs),
            rtol=0.0,
        )

    def test_validation(self):
        with pytest.raises(DomainError):
            kernels.gue_density(0, 1.0, 0.0)
        with pytest.raises(DomainError):
            kernels.gue_density(3, 0.0, 0.0)


class TestScalingTimes:
    def test_values(self):
        assert kernels.bulk_time(64) == pytest.approx(64.0 / math.pi**2, rel=1e-15)
        assert kernels.hard_edge_time(64) == pytest.approx(32.0, rel=1e-15)
        assert kernels.soft_edge_time(64) == pytest.approx(4.0, rel=1e-15)


class TestDriftDensity:
    def test_builtin_profile_mass_and_moment(self):
        dd = kernels.DriftDensity.semicircle(27)
        assert math.isclose(dd.mass(), 27.0, rel_tol=1e-12)
        assert dd.exact_drift_integral == -3.0
        assert math.isclose(dd.drift_integral(), -3.0, rel_tol=1e-12)
        dd.validate()

    def test_envelope_violation_is_rejected(self):
        bad = kernels.DriftDensity(
            N=1,
            fn=lambda x: np.where(
                (x < 0) & (x > -1.0), 2.0 * np.sqrt(np.maximum(-x, 0.0)), 0.0
            ),
            support=(-1.0, 0.0),
        )
        with pytest.raises(ValidationError):
            bad.validate()

    def test_positive_support_is_rejected(self):
        bad = kernels.DriftDensity(
            N=1, fn=lambda x: np.zeros_like(x), support=(-1.0, 0.5)
        )
        with pytest.raises(DomainError):
            bad.drift_integral()


class TestKernelSpec:
    def test_missing_parameters_are_rejected(self):
        with pytest.raises(ValidationError):
            kernels.KernelSpec(kernels.KernelFamily.HERMITE_N)
        with pytest.raises(ValidationError):
            kernels.KernelSpec(kernels.KernelFamily.BESSEL)
        with pytest.raises(ValidationError):
            kernels.KernelSpec(kernels.KernelFamily.CONFIG_DYSON)
        with pytest.raises(ValidationError):
            kernels.KernelSpec(
                kernels.KernelFamily.CONFIG_DRIFTED,
                xi=Configuration.from_points([0.0]),
            )

    def test_family_accepts_string_values(self):
        spec = kernels.KernelSpec("sine")
        assert spec.family is kernels.KernelFamily.SINE

    def test_static_dispatch_equal_times(self):
        spec = kernels.KernelSpec(kernels.KernelFamily.SINE)
        xs = np.linspace(-1.0, 1.0, 5)
        np.testing.assert_allclose(
            spec.matrix(0.4, xs, 0.4, xs), kernels.sine_kernel(xs, xs), atol=0.0
        )

    def test_finite_families_need_times(self):
        spec = kernels.KernelSpec(kernels.KernelFamily.HERMITE_N, N=2)
        with pytest.raises(ValidationError):
            spec.matrix(None, np.array([0.0]), None, np.array([0.0]))


class TestConfigurationKernels:
    def test_single_atom_reduces_to_heat_transition(self):
        spec = kernels.KernelSpec(
            kernels.KernelFamily.CONFIG_DYSON, xi=Configuration.from_points([0.7])
        )
        t = 0.8
        for y in (-0.5, 1.1):
            assert math.isclose(
                kernels.config_kernel(spec, t, y, t, y),
                specfun.heat_kernel_psin(t, 0.7, y),
                rel_tol=1e-11,
            )

    def test_single_atom_two_time_joint_density(self):
        spec = kernels.KernelSpec(
            kernels.KernelFamily.CONFIG_DYSON, xi=Configuration.from_points([0.7])
        )
        s, t, x, y = 0.5, 1.2, 0.2, 1.5
        k = lambda a, xv, b, yv: kernels.config_kernel(spec, a, xv, b, yv)
        joint = k(s, x, s, x) * k(t, y, t, y) - k(s, x, t, y) * k(t, y, s, x)
        exact = specfun.heat_kernel_psin(s, 0.7, x) * specfun.heat_kernel_psin(
            t - s, x, y
        )
        assert math.isclose(joint, exact, rel_tol=1e-11)

    def test_two_atom_density_mass(self):
        spec = kernels.KernelSpec(
            kernels.KernelFamily.CONFIG_DYSON,
            xi=Configuration.from_points([-0.4, 0.9]),
        )
        xs, wx = gauss_legendre_panels(np.linspace(-14.0, 14.0, 29), 12)
        dens = np.array(
            [kernels.config_kernel(spec, 1.2, float(v), 1.2, float(v)) for v in xs]
        )
        assert math.isclose(float(wx @ dens), 2.0, rel_tol=1e-10)

    @pytest.mark.parametrize("nu", [0.0, 1.0, 0.5])
    def test_hard_edge_single_atom_reduces_to_transition(self, nu):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spec = kernels.KernelSpec(
                kernels.KernelFamily.CONFIG_BESQ,
                nu=nu,
                xi=Configuration.from_points([1.3]),
            )
            t = 0.8
            for y in (0.4, 2.5):
                assert math.isclose(
                    kernels.config_kernel(spec, t, y, t, y),
                    specfun.bessel_transition(nu, t, 1.3, y),
                    rel_tol=1e-11,
                )

    def test_fractional_index_warns_about_continuation(self):
        spec = kernels.KernelSpec(
            kernels.KernelFamily.CONFIG_BESQ,
            nu=0.5,
            xi=Configuration.from_points([1.3]),
        )
        with pytest.warns(RuntimeWarning):
            kernels.config_kernel(spec, 0.8, 0.4, 0.8, 0.4)

    def test_drifted_single_atom_reduces_to_shifted_heat_transition(self):
        dd = kernels.DriftDensity.semicircle(8)
        spec = kernels.KernelSpec(
            kernels.KernelFamily.CONFIG_DRIFTED,
            xi=Configuration.from_points([0.3]),
            drift=dd,
        )
        t = 0.8
        shift = 0.3 + t * t / 4.0 + t * dd.drift_integral()
        for y in (-1.0, 0.6):
            assert math.isclose(
                kernels.config_kernel(spec, t, y, t, y),
                specfun.heat_kernel_psin(t, 0.0, y - shift),
                rel_tol=1e-11,
            )

    def test_atoms_with_multiplicity_are_rejected(self):
        bad = Configuration(points=np.array([0.5]), multiplicities=np.array([2]))
        spec = kernels.KernelSpec(kernels.KernelFamily.CONFIG_DYSON, xi=bad)
        with pytest.raises(UnsupportedConfigurationError):
            kernels.config_kernel(spec, 0.8, 0.1, 0.8, 0.1)


class TestExtendedKernels:
    def test_sine_depends_only_on_time_difference(self):
        v1 = kernels.extended_sine_kernel(0.3, np.array([0.4]), 0.9, np.array([-0.2]))
        v2 = kernels.extended_sine_kernel(0.0, np.array([0.4]), 0.6, np.array([-0.2]))
        assert math.isclose(v1.item(), v2.item(), rel_tol=1e-13)

    def test_equal_time_reductions(self):
        xs = np.linspace(-1.5, 1.5, 5)
        tiny = 1e-300
        np.testing.assert_allclose(
            kernels.extended_sine_kernel(0.0, xs, tiny, xs),
            kernels.sine_kernel(xs, xs),
            atol=1e-10,
        )
        np.testing.assert_allclose(
            kernels.extended_airy_kernel(0.0, xs, 0.0, xs),
            kernels.airy_kernel(xs, xs),
            atol=1e-10,
        )
        zs = np.linspace(0.2, 3.0, 5)
        np.testing.assert_allclose(
            kernels.extended_bessel_kernel(0.5, 0.0, zs, tiny, zs),
            kernels.bessel_kernel(0.5, zs, zs),
            atol=1e-10,
        )


class TestKernelCsv:
    def test_row_format_round_trips(self, tmp_path):
        path = tmp_path / "kernel.csv"
        rows = [
            ("sine", None, None, 0.0, 0.25, 0.0, 0.5, float(kernels.sine_kernel(0.25, 0.5))),
            ("hermiteN", 3, None, 0.2, -1.0, 0.9, 1.0, 0.125),
        ]
        kernels.write_kernel_csv(path, rows)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            data = list(reader)
        assert header == ["family", "N", "nu", "s", "x", "t", "y", "value"]
        assert len(data) == 2
        assert data[0][0] == "sine"
        # 17-significant-digit fields round-trip exactly
        assert float(data[0][7]) == float(kernels.sine_kernel(0.25, 0.5))
        assert float(data[1][7]) == 0.125
