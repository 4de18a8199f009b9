import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from su11dyn import (
    WaveguideParams,
    compare_solutions,
    integrate_schrodinger,
    propagate_fields,
    sink_source_model,
    transition_probability,
    waveguide_coupling,
    waveguide_transform,
)
from su11dyn.closed_forms import TAU_COUPLING, KAPPA_COUPLING
from su11dyn.core import SIGMA_X, SIGMA_Y, SIGMA_Z
from su11dyn.errors import DegenerateCouplingError, DomainError
from su11dyn.scenarios import ROTATION, coupling_schedule, waveguide_matrix


class TestSinkSource:
    def test_upper_quadrant(self):
        pt, model = sink_source_model(1.0, math.pi / 2)
        assert pt.omega_abs == 1.0 and pt.phi_omega == math.pi / 2
        assert model.phi_omega0 == math.pi / 2

    def test_coupling_start(self):
        pt, _ = sink_source_model(2.0, math.pi / 6)
        assert pt.omega_abs == pytest.approx(1.0)
        assert pt.gamma(0.0) == pytest.approx(1.5)

    def test_lower_quadrant(self):
        pt, model = sink_source_model(1.0, 3 * math.pi / 4)
        assert pt.phi_omega == -math.pi / 2 and model.phi_omega0 == -math.pi / 2

    def test_errors(self):
        with pytest.raises(DomainError):
            sink_source_model(0.0, 1.0)
        with pytest.raises(DomainError):
            sink_source_model(1.0, math.pi)
        with pytest.raises(DegenerateCouplingError):
            sink_source_model(1.0, 1e-17)

    def test_kappa_form_solves_the_pt_model(self):
        pt, model = sink_source_model(1.5, 2.0, t_max=10.0, convention=KAPPA_COUPLING)
        times = np.linspace(0, 10, 101)
        res = integrate_schrodinger(pt.hamiltonian(), (0, 10), 1e-10, times)
        rep = compare_solutions(model.cayley_klein_solution, res)
        assert rep.passed

    def test_tau_form_coupling_does_not(self):
        pt, model = sink_source_model(1.0, math.pi / 2, t_max=10.0, convention=TAU_COUPLING)
        times = np.linspace(0, 10, 101)
        res = integrate_schrodinger(pt.hamiltonian(), (0, 10), 1e-10, times)
        assert not compare_solutions(model.cayley_klein_solution, res).passed


class TestTransform:
    @pytest.mark.parametrize("eps, z", [(1.0, 0.0), (0.7, 2.3), (2.0, 15.0)])
    def test_conjugation_identity(self, eps, z):
        p = WaveguideParams(eps, 20.0)
        M = waveguide_matrix(eps, waveguide_coupling(eps, z))
        H = waveguide_transform(p).matrix(z)
        np.testing.assert_allclose(ROTATION @ M @ ROTATION.conj().T, H, atol=1e-15)

    def test_constant_coupling_form(self):
        M = waveguide_matrix(1.0, 1.0)
        np.testing.assert_allclose(ROTATION @ M @ ROTATION.conj().T, [[1, 1j], [1j, -1]], atol=1e-15)

    def test_pauli_images(self):
        conj = lambda A: ROTATION @ A @ ROTATION.conj().T
        np.testing.assert_allclose(conj(SIGMA_Z), SIGMA_X, atol=1e-15)
        np.testing.assert_allclose(conj(SIGMA_X), -SIGMA_Z, atol=1e-15)
        np.testing.assert_allclose(conj(SIGMA_Y), SIGMA_Y, atol=1e-15)

    def test_fourfold_application_is_identity_on_hamiltonians(self):
        r4 = np.linalg.matrix_power(ROTATION, 4)
        np.testing.assert_allclose(r4, -np.eye(2), atol=1e-15)
        M = waveguide_matrix(0.9, 1.3)
        np.testing.assert_allclose(r4 @ M @ r4.conj().T, M, atol=1e-14)

    def test_unitary(self):
        np.testing.assert_allclose(ROTATION @ ROTATION.conj().T, np.eye(2), atol=1e-15)


class TestCoupling:
    def test_values(self):
        assert waveguide_coupling(2.0, 0.0) == 3.0
        assert waveguide_coupling(2.0, 0.5) == pytest.approx(2.5)
        assert waveguide_coupling(2.0, 1e9) == pytest.approx(2.0)

    def test_kappa_convention(self):
        assert waveguide_coupling(1.0, 0.5, KAPPA_COUPLING) == pytest.approx(1.5)
        assert coupling_schedule(1.0, KAPPA_COUPLING)(0.0) == 2.0

    def test_strictly_decreasing_and_bounded(self):
        g = waveguide_coupling(1.3, np.linspace(0, 40, 4001))
        assert np.all(np.diff(g) < 0)
        assert np.all((g > 1.3) & (g <= 1.5 * 1.3))

    def test_errors(self):
        with pytest.raises(DomainError):
            waveguide_coupling(0.0, 1.0)
        with pytest.raises(DomainError):
            waveguide_coupling(1.0, -1.0)


class TestPropagation:
    def test_start(self):
        traj = propagate_fields(WaveguideParams(1.0, 5.0), [0.0])
        assert traj.E1[0] == pytest.approx(1.0) and abs(traj.E2[0]) < 1e-15
        assert traj.transfer[0] == 0.0

    def test_quarter_transfer_in_kappa_convention(self):
        p = WaveguideParams(1.0, 5.0, convention=KAPPA_COUPLING)
        z = math.sqrt(3) / 2
        traj = propagate_fields(p, [0.0, z])
        assert traj.transfer[-1] == pytest.approx(0.25, abs=1e-9)

    def test_half_transfer_far_away(self):
        traj = propagate_fields(WaveguideParams(1.0, 100.0), np.linspace(0, 100, 11))
        assert abs(traj.transfer[-1] - 0.5) < 0.005
        assert np.all(traj.transfer < 0.5)

    def test_transfer_matches_density_route(self):
        traj = propagate_fields(WaveguideParams(0.8, 30.0, (0.6, 0.8j)), np.linspace(0, 30, 61))
        np.testing.assert_allclose(traj.transfer, traj.transfer_density, atol=1e-9)
        np.testing.assert_allclose(traj.transfer, [transition_probability(c) for c in traj.cayley_klein])

    def test_raw_fields_against_direct_integration(self):
        eps, e0 = 0.9, (0.3 + 0.1j, 1.0)
        p = WaveguideParams(eps, 12.0, e0)
        z = np.linspace(0, 12, 25)
        traj = propagate_fields(p, z)

        def rhs(zz, y):
            return -1j * waveguide_matrix(eps, waveguide_coupling(eps, zz)) @ y

        ref = solve_ivp(rhs, (0, 12), np.array(e0, dtype=complex), t_eval=z, rtol=1e-11, atol=1e-12)
        scale = np.max(np.abs(ref.y), axis=0)
        assert np.max(np.abs(traj.E1 - ref.y[0]) / scale) < 1e-7
        assert np.max(np.abs(traj.E2 - ref.y[1]) / scale) < 1e-7
        # unnormalized: the power is not conserved
        power = np.abs(traj.E1) ** 2 + np.abs(traj.E2) ** 2
        assert power[-1] > 2 * power[0]
        np.testing.assert_allclose(traj.power_fraction, np.abs(traj.E2) ** 2 / power)

    def test_params_validation(self):
        with pytest.raises(DomainError):
            WaveguideParams(0.0, 1.0)
        with pytest.raises(DomainError):
            WaveguideParams(1.0, 0.0)
        with pytest.raises(DomainError):
            WaveguideParams(1.0, 1.0, (0, 0))
        with pytest.raises(DomainError):
            WaveguideParams(1.0, 1.0, convention="nope")

    def test_grid_validation(self):
        p = WaveguideParams(1.0, 5.0)
        for grid in ([], [0.0, 6.0], [1.0, 0.5], [[0.0, 1.0]]):
            with pytest.raises(DomainError):
                propagate_fields(p, grid)
