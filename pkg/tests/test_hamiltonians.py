import numpy as np
import pytest

import adialab as al
from adialab.errors import DomainError, IntegrityError
from adialab.hamiltonians import eval_batch, hermitian
from adialab.problems import PAULI_X, PAULI_Z

from conftest import rotating_two_level


class TestHermitianOperator:
    def test_accepts_hermitian(self):
        op = hermitian([[1.0, 1j], [-1j, 2.0]])
        assert op.dim == 2

    def test_rejects_non_hermitian(self):
        with pytest.raises(IntegrityError):
            hermitian([[0.0, 1.0], [0.5, 0.0]])

    def test_rejects_tiny_asymmetry_relative_to_scale(self):
        mat = np.array([[1e6, 1.0], [1.0 + 1e-5, 1e6]], dtype=complex)
        with pytest.raises(IntegrityError):
            hermitian(mat)

    def test_rejects_dim_one_and_nonsquare(self):
        with pytest.raises(DomainError):
            hermitian([[1.0]])
        with pytest.raises(DomainError):
            hermitian(np.ones((2, 3)))

    def test_entries_immutable(self):
        op = hermitian(PAULI_X)
        with pytest.raises(ValueError):
            op.entries[0, 0] = 5.0


class TestEval:
    def test_endpoints(self, lz):
        assert np.allclose(al.eval_at(lz, 0.0).entries, PAULI_Z)
        assert np.allclose(al.eval_at(lz, 1.0).entries, PAULI_X)

    def test_midpoint_convex_combination(self, lz):
        # by hand: 0.5*Z + 0.5*X
        expected = np.array([[0.5, 0.5], [0.5, -0.5]])
        assert np.allclose(al.eval_at(lz, 0.5).entries, expected)

    def test_domain_error_outside_interval(self, lz):
        for s in (-0.01, 1.2, np.nan):
            with pytest.raises(DomainError):
                al.eval_at(lz, s)

    def test_non_hermitian_evaluator_is_integrity_error(self):
        bad = al.TimeDependentHamiltonian(
            dim=2, evaluator=lambda s: np.array([[0.0, 1.0], [0.0, 0.0]])
        )
        with pytest.raises(IntegrityError):
            al.eval_at(bad, 0.5)

    def test_batch_matches_pointwise(self, grover2):
        grid = np.linspace(0.0, 1.0, 17)
        mats = eval_batch(grover2, grid)
        for s, mat in zip(grid, mats):
            assert np.allclose(mat, al.eval_at(grover2, float(s)).entries)


class TestDerivative:
    def test_affine_first_derivative_exact(self, lz):
        expected = PAULI_X - PAULI_Z
        for s in (0.0, 0.31, 1.0):
            assert np.allclose(al.derivative(lz, s, 1).entries, expected)

    def test_affine_second_derivative_zero(self, lz):
        assert np.allclose(al.derivative(lz, 0.4, 2).entries, 0.0)

    def test_invalid_order(self, lz):
        with pytest.raises(DomainError):
            al.derivative(lz, 0.5, 3)

    def test_trig_instance_analytic_vs_finite_difference(self):
        # H(s) = cos(pi s) Z + sin(pi s) X; H'(0) = pi X
        analytic = rotating_two_level(np.pi)
        for step in (1e-4, 1e-5, 1e-6):
            fd = al.TimeDependentHamiltonian(
                dim=2,
                evaluator=analytic.evaluator,
                derivative_mode="finite_difference",
                fd_step=step,
            )
            got = al.derivative(fd, 0.0, 1).entries
            want = al.derivative(analytic, 0.0, 1).entries
            assert np.allclose(got, want, atol=1e-4)
        assert np.allclose(want, -np.pi * PAULI_X)  # d/ds of -sin is -pi X at 0

    def test_fd_error_scales_quadratically(self):
        analytic = rotating_two_level(np.pi)
        steps = [2e-3, 1e-3, 5e-4, 2.5e-4]
        errors = []
        for step in steps:
            fd = al.TimeDependentHamiltonian(
                dim=2,
                evaluator=analytic.evaluator,
                derivative_mode="finite_difference",
                fd_step=step,
            )
            diff = (
                al.derivative(fd, 0.37, 1).entries
                - al.derivative(analytic, 0.37, 1).entries
            )
            errors.append(np.abs(diff).max())
        slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
        assert 1.7 <= slope <= 2.3

    def test_one_sided_stencils_at_boundaries(self):
        analytic = rotating_two_level(np.pi)
        fd = al.TimeDependentHamiltonian(
            dim=2,
            evaluator=analytic.evaluator,
            derivative_mode="finite_difference",
            fd_step=1e-4,
        )
        for s in (0.0, 1.0):
            for order in (1, 2):
                got = al.derivative(fd, s, order).entries
                want = al.derivative(analytic, s, order).entries
                assert np.abs(got - want).max() < 1e-4


class TestOperatorNorm:
    def test_zero_matrix(self):
        assert al.operator_norm(hermitian(np.zeros((2, 2)))) == 0.0

    def test_pauli_x(self):
        assert al.operator_norm(hermitian(PAULI_X)) == pytest.approx(1.0)

    def test_x_minus_z_closed_form(self):
        # 2x2 eigenvalues of X - Z are +/- sqrt(2)
        assert al.operator_norm(hermitian(PAULI_X - PAULI_Z)) == pytest.approx(
            np.sqrt(2.0)
        )


class TestNormBundle:
    def test_landau_zener_values(self, lz):
        nb = al.norm_bundle(lz)
        assert nb.norm_H1 == pytest.approx(np.sqrt(2.0), rel=1e-12)
        assert nb.norm_H2 == 0.0
        assert nb.norm_H == pytest.approx(1.0, rel=1e-9)

    def test_constant_instance(self, const_instance):
        nb = al.norm_bundle(const_instance)
        assert nb.norm_H1 == 0.0
        assert nb.norm_H2 == 0.0
        assert nb.norm_H == pytest.approx(2.0)

    def test_grover2_projector_difference_norm(self, grover2):
        # rank-2 projector difference with overlap 1/2: sqrt(1 - 1/4)
        nb = al.norm_bundle(grover2)
        assert nb.norm_H1 == pytest.approx(np.sqrt(3.0) / 2.0, abs=1e-9)

    def test_monotone_under_grid_refinement(self, lz, rand4, grover2):
        for inst in (lz, rand4, grover2):
            previous = None
            for grid_size in (257, 513, 1025):
                nb = al.norm_bundle(inst, grid_size)
                if previous is not None:
                    assert nb.norm_H >= previous.norm_H - 1e-9
                    assert nb.norm_H1 >= previous.norm_H1 - 1e-9
                    assert nb.norm_H2 >= previous.norm_H2 - 1e-9
                previous = nb

    def test_grid_size_validation(self, lz):
        with pytest.raises(DomainError):
            al.norm_bundle(lz, 1)

    def test_outputs_stay_hermitian_on_samples(self):
        inst = rotating_two_level(2.0)
        rng = np.random.default_rng(3)
        for s in rng.uniform(0.0, 1.0, size=25):
            for mat in (
                al.eval_at(inst, s).entries,
                al.derivative(inst, s, 1).entries,
                al.derivative(inst, s, 2).entries,
            ):
                defect = np.abs(mat - mat.conj().T).max()
                assert defect <= 1e-12 * max(np.abs(mat).max(), 1e-300)
