import dataclasses

import numpy as np
import pytest

import adialab as al
from adialab.errors import DomainError, GapCollapseError, UnderResolvedGridError
from adialab.hamiltonians import hermitian
from adialab.problems import PAULI_X, PAULI_Z, landau_zener_eigenvalue

from conftest import rotating_two_level


class TestDecompose:
    def test_diag(self):
        sys = al.decompose(hermitian(np.diag([1.0, -1.0])))
        assert np.allclose(sys.eigenvalues, [-1.0, 1.0])
        assert abs(abs(sys.eigenvectors[1, 0]) - 1.0) < 1e-12

    def test_pauli_x(self):
        sys = al.decompose(hermitian(PAULI_X))
        assert np.allclose(sys.eigenvalues, [-1.0, 1.0])
        minus = np.array([1.0, -1.0]) / np.sqrt(2.0)
        assert abs(abs(np.vdot(sys.eigenvectors[:, 0], minus)) - 1.0) < 1e-12

    def test_landau_zener_midpoint(self):
        sys = al.decompose(hermitian(0.5 * (PAULI_X + PAULI_Z)))
        assert np.allclose(sys.eigenvalues, [-np.sqrt(2) / 2, np.sqrt(2) / 2])

    def test_invariants_random(self):
        rng = np.random.default_rng(0)
        raw = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        op = hermitian(0.5 * (raw + raw.conj().T))
        sys = al.decompose(op)
        v = sys.eigenvectors
        assert np.abs(v.conj().T @ v - np.eye(6)).max() < 1e-10
        residual = op.entries @ v - v * sys.eigenvalues
        assert np.linalg.norm(residual, axis=0).max() <= 1e-9 * al.operator_norm(op)

    def test_coefficients_roundtrip(self):
        sys = al.decompose(hermitian(PAULI_X))
        vec = np.array([0.6, 0.8], dtype=complex)
        coeffs = sys.coefficients(vec)
        assert np.allclose(sys.eigenvectors @ coeffs, vec)


class TestTrackEigenpath:
    def test_constant_hamiltonian_constant_path(self, const_instance):
        path = al.track_eigenpath(const_instance, 65)
        e1 = np.zeros(2)
        e1[0] = 1.0
        for state in path.states:
            assert abs(abs(np.vdot(state, e1)) - 1.0) < 1e-12
        assert np.abs(path.gauge_phase).max() == 0.0

    def test_landau_zener_gammas(self, lz):
        path = al.track_eigenpath(lz, 1025)
        for j, s in ((0, 0.0), (512, 0.5), (1024, 1.0)):
            assert path.gammas[j] == pytest.approx(
                landau_zener_eigenvalue(s), abs=1e-12
            )

    def test_unit_norm_and_gauge_invariants(self, suite):
        for inst in suite:
            path = al.track_eigenpath(inst, 257)
            norms = np.linalg.norm(path.states, axis=1)
            assert np.abs(norms - 1.0).max() < 1e-12
            overlaps = np.einsum("ij,ij->i", path.states[:-1].conj(), path.states[1:])
            assert np.abs(overlaps.imag).max() < 1e-12
            assert overlaps.real.min() >= 0.99  # default-density continuity

    def test_match_selector(self, const_instance):
        # select the eigenvalue-2 branch by initial vector
        e2 = np.array([0.0, 1.0], dtype=complex)
        path = al.track_eigenpath(const_instance, 33, selector=e2)
        assert np.allclose(path.gammas, 2.0)

    def test_degenerate_instance_collapses(self):
        with pytest.raises(GapCollapseError, match="s="):
            al.track_eigenpath(al.transverse_ising(2), 257)

    def test_under_resolved_grid(self):
        # endpoints diagonal in mutually unbiased bases: with only two grid
        # points every candidate overlap is 1/sqrt(8) < 0.5
        d = 8
        diag = np.diag(np.arange(d, dtype=float))
        dft = np.exp(
            2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d
        ) / np.sqrt(d)
        inst = al.affine_hamiltonian(diag, dft @ diag @ dft.conj().T)
        with pytest.raises(UnderResolvedGridError, match="refine"):
            al.track_eigenpath(inst, 2)
        al.track_eigenpath(inst, 1025)  # fine grid succeeds

    def test_grid_validation(self, lz):
        with pytest.raises(DomainError):
            al.track_eigenpath(lz, 1)
        with pytest.raises(DomainError):
            al.track_eigenpath(lz, 9, selector="excited")


class TestSpectralGap:
    def test_constant_three_level(self):
        inst = al.constant((0.0, 1.0, -1.0))
        e1 = np.array([1.0, 0.0, 0.0], dtype=complex)
        path = al.track_eigenpath(inst, 65, selector=e1)
        report = al.spectral_gap(inst, path)
        assert report.lambda_min == pytest.approx(1.0)

    def test_landau_zener(self, lz):
        path = al.track_eigenpath(lz, 1025)
        report = al.spectral_gap(lz, path)
        assert report.lambda_min == pytest.approx(np.sqrt(2.0), abs=1e-9)
        assert report.argmin_s == pytest.approx(0.5, abs=1e-6)

    def test_grover(self, grover2):
        path = al.track_eigenpath(grover2, 1025)
        report = al.spectral_gap(grover2, path)
        assert report.lambda_min == pytest.approx(0.5, abs=1e-9)
        assert report.argmin_s == pytest.approx(0.5, abs=1e-6)

    def test_inconsistent_path_rejected(self, lz, grover2):
        path = al.track_eigenpath(lz, 257)
        rng = np.random.default_rng(1)
        noise = rng.standard_normal(path.states.shape)
        bad_states = path.states + 0.05 * noise
        bad_states /= np.linalg.norm(bad_states, axis=1)[:, None]
        bad = dataclasses.replace(path, states=bad_states)
        with pytest.raises(DomainError, match="inconsistent"):
            al.spectral_gap(lz, bad)

    def test_gap_stable_under_grid_refinement(self, suite):
        for inst in suite:
            norm_h = al.norm_bundle(inst, 129).norm_H
            gap_coarse = al.track_eigenpath(inst, 513).gap
            gap_fine = al.track_eigenpath(inst, 1025).gap
            assert abs(gap_fine - gap_coarse) < 1e-6 * norm_h


class TestPathDerivatives:
    def test_constant_path_zero(self, const_instance):
        path = al.track_eigenpath(const_instance, 65)
        assert np.abs(al.path_derivatives(path, 1)).max() < 1e-12
        assert np.abs(al.path_derivatives(path, 2)).max() < 1e-12

    def test_planar_rotation_speed(self):
        # ground state angle is rate*s/2; speed is rate/2 = pi/2 for rate pi
        path = al.track_eigenpath(rotating_two_level(np.pi), 1025)
        speeds = np.linalg.norm(al.path_derivatives(path, 1), axis=1)
        assert np.abs(speeds - np.pi / 2.0).max() < 1e-4

    def test_landau_zener_midpoint_speed(self, lz):
        # mixing angle theta with tan(2 theta) = s/(1-s):
        # ||Psi'(s)|| = d theta/ds = 1 / (2((1-s)^2 + s^2)) -> 1 at s=1/2
        path = al.track_eigenpath(lz, 2049)
        speeds = np.linalg.norm(al.path_derivatives(path, 1), axis=1)
        assert speeds[1024] == pytest.approx(1.0, abs=1e-4)

    def test_too_coarse(self, lz):
        path = al.track_eigenpath(lz, 4)
        with pytest.raises(DomainError):
            al.path_derivatives(path, 1)

    def test_invalid_order(self, lz):
        path = al.track_eigenpath(lz, 65)
        with pytest.raises(DomainError):
            al.path_derivatives(path, 3)


class TestGaugeResidual:
    def test_constant_path(self, const_instance):
        path = al.track_eigenpath(const_instance, 65)
        assert al.gauge_residual(path) < 1e-12

    def test_landau_zener_default_grid(self, lz):
        path = al.track_eigenpath(lz, 1025)
        assert al.gauge_residual(path) <= 1e-4

    def test_phase_twist_detected(self, lz):
        # Phi(s) = e^{is} Psi(s): <Phi', Phi> = i + <Psi', Psi>
        path = al.track_eigenpath(lz, 1025)
        twisted = dataclasses.replace(
            path, states=path.states * np.exp(1j * path.grid)[:, None]
        )
        assert al.gauge_residual(twisted) == pytest.approx(1.0, abs=1e-3)


class TestDerivativeBounds:
    def test_first_bound_raw_norms(self, suite):
        # max ||Psi'|| <= 1.05 ||H'|| / lambda on the default grid
        for inst in suite:
            path = al.track_eigenpath(inst, 1025)
            norms = al.norm_bundle(inst)
            speeds = np.linalg.norm(al.path_derivatives(path, 1), axis=1)
            assert speeds.max() <= 1.05 * norms.norm_H1 / path.gap

    def test_second_bound_shifted_frame(self, suite):
        # the second-derivative bound applies with the tracked eigenvalue
        # shifted to zero, using the shifted instance's norms
        for inst in suite:
            path = al.track_eigenpath(inst, 1025)
            shifted = al.shift_to_zero_eigenvalue(inst, path)
            nb = al.norm_bundle(shifted)
            lam = path.gap
            accel = np.linalg.norm(al.path_derivatives(path, 2), axis=1)
            bound = nb.norm_H2 / lam + 3.0 * nb.norm_H1**2 / lam**2
            assert accel.max() <= 1.05 * bound
