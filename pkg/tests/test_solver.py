import numpy as np
import pytest

from labelprism import NumericalError
from labelprism.solver import (
    CGInfo,
    StressProblem,
    SymSparseMatrix,
    conjugate_gradient,
    majorant_rhs_matrix,
    majorization_step,
    midpoint_penalty,
    midpoint_penalty_matrix,
    penalized_stress,
    proximity_stress,
    stress_laplacian,
)

from _oracles import penalty_by_summation, stress_by_summation


def problem_from(n, edges=(), penalties=(), rho=0.0):
    return StressProblem.from_terms(n, edges=edges, penalties=penalties, rho=rho)


class TestSymSparseMatrix:
    def test_accumulation_and_symmetry(self):
        m = SymSparseMatrix(3)
        m.add(0, 1, 2.0)
        m.add(1, 0, 3.0)
        m.add(2, 2, 1.0)
        assert m.get(0, 1) == 5.0
        assert m.get(1, 0) == 5.0
        assert m.nnz == 2
        dense = m.to_dense()
        assert np.array_equal(dense, dense.T)

    def test_matvec_matches_dense(self):
        rng = np.random.default_rng(0)
        m = SymSparseMatrix(6)
        for _ in range(12):
            i, j = rng.integers(0, 6, 2)
            m.add(int(i), int(j), float(rng.normal()))
        x = rng.normal(size=6)
        assert np.allclose(m.matvec(x), m.to_dense() @ x, atol=1e-12)

    def test_out_of_range_rejected(self):
        m = SymSparseMatrix(2)
        with pytest.raises(IndexError):
            m.add(0, 2, 1.0)


class TestStressLaplacian:
    def test_single_edge(self):
        p = problem_from(2, edges=[(0, 1, 2.0, 1.0)])
        dense = stress_laplacian(p).to_dense()
        assert np.array_equal(dense, np.array([[2.0, -2.0], [-2.0, 2.0]]))

    def test_path_graph(self):
        p = problem_from(3, edges=[(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0)])
        dense = stress_laplacian(p).to_dense()
        assert np.array_equal(dense, np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]], dtype=float))

    def test_row_sums_zero_on_random_graphs(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(2, 30))
            m = int(rng.integers(1, 3 * n))
            edges = []
            for _ in range(m):
                i, j = rng.choice(n, 2, replace=False)
                edges.append((int(i), int(j), float(rng.uniform(0.1, 5)), 1.0))
            lap = stress_laplacian(problem_from(n, edges=edges))
            assert np.max(np.abs(lap.row_sums())) < 1e-12 * max(
                1.0, np.max(np.abs(lap.to_dense()))
            )

    def test_psd_on_random_vectors(self):
        rng = np.random.default_rng(2)
        edges = [(int(i), int(i + 1), float(rng.uniform(0.1, 2)), 1.0) for i in range(9)]
        dense = stress_laplacian(problem_from(10, edges=edges)).to_dense()
        for _ in range(100):
            v = rng.normal(size=10)
            assert v @ dense @ v >= -1e-9


class TestMidpointPenaltyMatrix:
    def test_single_triple_frozen_matrix(self):
        # Expanding w * (x_k - (x_i + x_j)/2)^2 for (i, j, k) = (0, 1, 2), w = 1.
        p = problem_from(3, penalties=[(0, 1, 2, 1.0)], rho=1.0)
        dense = midpoint_penalty_matrix(p).to_dense()
        expect = np.array(
            [[0.25, 0.25, -0.5], [0.25, 0.25, -0.5], [-0.5, -0.5, 1.0]]
        )
        assert np.allclose(dense, expect, atol=1e-15)

    def test_quadratic_form_value_1d(self):
        # x = (0, 2, 3): the penalty is (3 - (0 + 2)/2)^2 = 4.
        p = problem_from(3, penalties=[(0, 1, 2, 1.0)], rho=1.0)
        dense = midpoint_penalty_matrix(p).to_dense()
        x = np.array([0.0, 2.0, 3.0])
        assert x @ dense @ x == pytest.approx(4.0, abs=1e-12)

    def test_no_penalties_zero_matrix(self):
        p = problem_from(3, edges=[(0, 1, 1.0, 1.0)])
        assert midpoint_penalty_matrix(p).nnz == 0

    def test_quadratic_form_identity_random(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(3, 20))
            triples = []
            for _ in range(int(rng.integers(1, 6))):
                i, j, k = rng.choice(n, 3, replace=False)
                triples.append((int(i), int(j), int(k), float(rng.uniform(0.1, 3))))
            p = problem_from(n, penalties=triples, rho=1.0)
            dense = midpoint_penalty_matrix(p).to_dense()
            x = rng.normal(size=(n, 2))
            form = x[:, 0] @ dense @ x[:, 0] + x[:, 1] @ dense @ x[:, 1]
            direct = penalty_by_summation(triples, x)
            assert form == pytest.approx(direct, rel=1e-10, abs=1e-12)

    def test_at_most_six_positions_per_label(self):
        rng = np.random.default_rng(4)
        n = 30
        triples = []
        for t in range(8):
            i, j, k = rng.choice(n, 3, replace=False)
            triples.append((int(i), int(j), int(k), 1.0))
        m = midpoint_penalty_matrix(problem_from(n, penalties=triples, rho=1.0))
        assert m.nnz <= 6 * len(triples)

    def test_psd_on_random_vectors(self):
        rng = np.random.default_rng(5)
        triples = [(0, 1, 2, 1.5), (2, 3, 4, 0.5), (0, 4, 5, 2.0)]
        dense = midpoint_penalty_matrix(problem_from(6, penalties=triples, rho=1.0)).to_dense()
        for _ in range(100):
            v = rng.normal(size=6)
            assert v @ dense @ v >= -1e-9


class TestMajorantRhsMatrix:
    def test_single_edge_entry_formula(self):
        # w = 1, d = 2, current distance 1: off-diagonal -w*d/dist = -2.
        p = problem_from(2, edges=[(0, 1, 1.0, 2.0)])
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        dense = majorant_rhs_matrix(p, x).to_dense()
        assert np.allclose(dense, [[2.0, -2.0], [-2.0, 2.0]], atol=1e-15)

    def test_equals_laplacian_when_distances_match_targets(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 5, size=(8, 2))
        edges = []
        for i in range(7):
            d = float(np.linalg.norm(x[i] - x[i + 1]))
            edges.append((i, i + 1, 1.0 / d**2, d))
        p = problem_from(8, edges=edges)
        lhs = majorant_rhs_matrix(p, x).matvec(x[:, 0])
        rhs = stress_laplacian(p).matvec(x[:, 0])
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_row_sums_zero(self):
        rng = np.random.default_rng(7)
        n = 15
        x = rng.uniform(0, 5, size=(n, 2))
        edges = []
        for _ in range(30):
            i, j = rng.choice(n, 2, replace=False)
            edges.append((int(i), int(j), float(rng.uniform(0.1, 2)), float(rng.uniform(0.5, 3))))
        m = majorant_rhs_matrix(problem_from(n, edges=edges), x)
        scale = np.max(np.abs(m.to_dense()))
        assert np.max(np.abs(m.row_sums())) <= 1e-12 * max(scale, 1.0)

    def test_coincident_endpoints_clamped(self):
        p = problem_from(2, edges=[(0, 1, 1.0, 2.0)])
        x = np.zeros((2, 2))
        dense = majorant_rhs_matrix(p, x).to_dense()
        assert np.all(np.isfinite(dense))


class TestConjugateGradient:
    def test_spd_2x2_exact_in_two_iterations(self):
        A = SymSparseMatrix(2)
        A.add(0, 0, 3.0)
        A.add(1, 1, 2.0)
        A.add(0, 1, 0.5)
        b = np.array([1.0, -2.0])
        x, info = conjugate_gradient(A, b, np.zeros(2))
        assert info.converged and info.iterations <= 2
        assert np.allclose(A.to_dense() @ x, b, atol=1e-9)

    def test_singular_laplacian_matches_pseudoinverse(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            n = int(rng.integers(4, 21))
            edges = [(i, i + 1, float(rng.uniform(0.5, 2)), 1.0) for i in range(n - 1)]
            for _ in range(n // 2):
                i, j = rng.choice(n, 2, replace=False)
                edges.append((int(i), int(j), float(rng.uniform(0.5, 2)), 1.0))
            A = stress_laplacian(problem_from(n, edges=edges))
            b = rng.normal(size=n)
            b -= b.mean()
            x, info = conjugate_gradient(A, b, np.zeros(n), tol=1e-10)
            assert info.converged
            expect = np.linalg.pinv(A.to_dense()) @ b
            assert abs(x.mean()) < 1e-8 * max(1.0, np.max(np.abs(x)))
            assert np.allclose(x - x.mean(), expect - expect.mean(), atol=1e-6)

    def test_zero_system(self):
        A = SymSparseMatrix(3)
        A.add(0, 1, -1.0)
        A.add(0, 0, 1.0)
        A.add(1, 1, 1.0)
        x, info = conjugate_gradient(A, np.zeros(3), np.zeros(3))
        assert info.converged and info.iterations == 0
        assert np.array_equal(x, np.zeros(3))

    def test_nonfinite_raises(self):
        A = SymSparseMatrix(2)
        A.add(0, 0, np.nan)
        A.add(1, 1, 1.0)
        with pytest.raises(NumericalError):
            conjugate_gradient(A, np.array([1.0, 1.0]), np.zeros(2))

    def test_jacobi_preconditioning_solves_correctly(self):
        # Badly scaled diagonal: Jacobi should not need more iterations
        # than the plain run and must give the same solution.
        rng = np.random.default_rng(12)
        n = 40
        A = SymSparseMatrix(n)
        scales = 10.0 ** rng.uniform(-3, 3, n)
        for i in range(n):
            A.add(i, i, float(scales[i]) + 2.0)
        for i in range(n - 1):
            A.add(i, i + 1, -1.0)
        b = rng.normal(size=n)
        x_plain, info_plain = conjugate_gradient(A, b, np.zeros(n), tol=1e-10)
        x_pre, info_pre = conjugate_gradient(A, b, np.zeros(n), tol=1e-10, jacobi=True)
        assert info_plain.converged and info_pre.converged
        assert np.allclose(x_plain, x_pre, atol=1e-7)
        assert info_pre.iterations <= info_plain.iterations


class TestMajorizationStep:
    def test_fixed_point_stays(self):
        # Targets equal current distances and the label sits at the midpoint:
        # both gradients vanish, so the step must return the input.
        x = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 0.0]])
        d = 4.0
        p = problem_from(
            3,
            edges=[(0, 1, 1.0 / d**2, d), (0, 2, 0.25, 2.0), (1, 2, 0.25, 2.0)],
            penalties=[(0, 1, 2, 1.0 / 16.0)],
            rho=4.0,
        )
        out = majorization_step(p, x)
        assert np.allclose(out, x, atol=1e-8)

    def test_two_nodes_move_apart_to_target(self):
        # Single spring, w=1, target 2, current distance 1: the minimizer
        # places the pair symmetrically at distance exactly 2.
        p = problem_from(2, edges=[(0, 1, 1.0, 2.0)])
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        out = majorization_step(p, x)
        assert np.allclose(out, [[-0.5, 0.0], [1.5, 0.0]], atol=1e-9)
        assert proximity_stress(p, out) < proximity_stress(p, x)

    def test_objective_never_increases_over_chained_steps(self):
        rng = np.random.default_rng(9)
        n = 12
        x = rng.uniform(0, 3, size=(n, 2))
        edges = []
        for _ in range(25):
            i, j = rng.choice(n, 2, replace=False)
            edges.append((int(i), int(j), float(rng.uniform(0.2, 2)), float(rng.uniform(0.5, 3))))
        triples = []
        for k in range(8, 12):
            i, j = rng.choice(8, 2, replace=False)
            triples.append((int(i), int(j), k, float(rng.uniform(0.2, 2))))
        p = problem_from(n, edges=edges, penalties=triples, rho=4.0)

        value = stress_by_summation(edges, x) + 4.0 * penalty_by_summation(triples, x)
        for _ in range(10):
            x = majorization_step(p, x)
            new_value = stress_by_summation(edges, x) + 4.0 * penalty_by_summation(triples, x)
            assert new_value <= value * (1 + 1e-9) + 1e-12
            value = new_value

    def test_translation_invariance(self):
        rng = np.random.default_rng(10)
        n = 8
        x = rng.uniform(0, 3, size=(n, 2))
        edges = [(i, i + 1, 1.0, 1.5) for i in range(n - 1)]
        p = problem_from(n, edges=edges)
        out = majorization_step(p, x)
        shift = np.array([113.0, -7.5])
        out_shifted = majorization_step(p, x + shift)
        assert np.allclose(out_shifted, out + shift, atol=1e-8)
        assert penalized_stress(p, x + shift) == pytest.approx(penalized_stress(p, x), rel=1e-12)

    def test_empty_problem_returns_copy(self):
        p = problem_from(1)
        x = np.array([[3.0, 4.0]])
        out = majorization_step(p, x)
        assert np.array_equal(out, x)
        assert out is not x

    def test_evaluators_match_oracles(self):
        rng = np.random.default_rng(11)
        n = 10
        x = rng.uniform(0, 3, size=(n, 2))
        edges = [(int(i), int(j), float(rng.uniform(0.2, 2)), float(rng.uniform(0.5, 3)))
                 for i, j in (rng.choice(n, 2, replace=False) for _ in range(15))]
        triples = [(0, 1, 5, 0.7), (2, 3, 6, 1.3)]
        p = problem_from(n, edges=edges, penalties=triples, rho=4.0)
        assert proximity_stress(p, x) == pytest.approx(stress_by_summation(edges, x), rel=1e-12)
        assert midpoint_penalty(p, x) == pytest.approx(penalty_by_summation(triples, x), rel=1e-12)
        assert penalized_stress(p, x) == pytest.approx(
            stress_by_summation(edges, x) + 4.0 * penalty_by_summation(triples, x), rel=1e-12
        )

    def test_invalid_problem_rejected(self):
        with pytest.raises(ValueError):
            problem_from(2, edges=[(0, 1, -1.0, 1.0)])
        with pytest.raises(ValueError):
            problem_from(2, edges=[(0, 1, 1.0, 0.0)])
        with pytest.raises(ValueError):
            problem_from(3, penalties=[(0, 1, 2, -0.5)])
