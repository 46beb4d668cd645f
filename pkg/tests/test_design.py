import numpy as np
import pytest
import scipy.linalg

from inputdesign.design import (
    DesignProblem,
    KernelSpec,
    SolverOptions,
    feasible_vertices,
    information_matrix,
    objective_gradient,
    objective_value,
    project_simplex,
    random_feasible,
    realize_kernel,
    solve_design,
)
from inputdesign.errors import BadDimension, BadHyperparameter, NotConverged
from inputdesign.inversion import solve_spectrum


def problem(N=8, n=2, C=8.0, criterion="D", **kw):
    return DesignProblem(N, n, C, 0.5, KernelSpec("TC", n), criterion, **kw)


def fd_gradient(f, r, h=1e-6):
    g = np.zeros_like(r)
    for i in range(r.size):
        e = np.zeros_like(r)
        e[i] = h
        g[i] = (f(r + e) - f(r - e)) / (2 * h)
    return g


class TestKernel:
    def test_tc_frozen(self):
        K = realize_kernel(KernelSpec("TC", 2, 1.0, 0.85))
        np.testing.assert_allclose(K, [[0.85, 0.7225], [0.7225, 0.7225]], rtol=1e-15)

    def test_scalar(self):
        assert realize_kernel(KernelSpec("TC", 1, 2.0, 0.3))[0, 0] == pytest.approx(0.6)

    def test_dc(self):
        K = realize_kernel(KernelSpec("DC", 3, 2.0, 0.8, 0.5))
        i, j = np.meshgrid(np.arange(1, 4), np.arange(1, 4), indexing="ij")
        np.testing.assert_allclose(K, 2 * 0.8 ** ((i + j) / 2) * 0.5 ** np.abs(i - j))

    def test_dc_zero_correlation_is_diagonal(self):
        K = realize_kernel(KernelSpec("DC", 3, 1.0, 0.5, 0.0))
        np.testing.assert_allclose(K, np.diag(0.5 ** np.arange(1, 4)))

    @pytest.mark.parametrize(
        "spec",
        [
            KernelSpec("TC", 2, 1.0, 1.2),
            KernelSpec("TC", 2, -1.0, 0.5),
            KernelSpec("DC", 2, 1.0, 0.5, 1.0),
            KernelSpec("custom", 2, matrix=[[1, 2], [2, 1]]),
            KernelSpec("custom", 2, matrix=[[1, 0], [1, 1]]),
            KernelSpec("custom", 2),
            KernelSpec("SS", 2),
        ],
    )
    def test_rejected(self, spec):
        with pytest.raises(BadHyperparameter):
            realize_kernel(spec)

    def test_custom(self):
        M = np.array([[2.0, 0.5], [0.5, 1.0]])
        np.testing.assert_array_equal(realize_kernel(KernelSpec("custom", 2, matrix=M)), M)


class TestInformationMatrix:
    def test_white_autocov(self):
        p = problem(n=3)
        K = realize_kernel(p.kernel)
        np.testing.assert_allclose(
            information_matrix(np.array([8.0, 0, 0]), p), 8 * np.eye(3) + 0.5 * np.linalg.inv(K)
        )

    def test_unregularized(self):
        p = problem(n=3, regularized=False)
        r = np.array([8.0, 1, -2])
        np.testing.assert_allclose(information_matrix(r, p), scipy.linalg.toeplitz(r))

    def test_scalar(self):
        p = DesignProblem(4, 1, 3.0, 0.5, KernelSpec("TC", 1, 1.0, 0.8))
        assert information_matrix(np.array([3.0]), p)[0, 0] == pytest.approx(3 + 0.5 / 0.8)

    def test_large_order_uses_cholesky(self):
        p = DesignProblem(80, 70, 80.0, 0.5, KernelSpec("TC", 70, 1.0, 0.95))
        K = realize_kernel(p.kernel)
        np.testing.assert_allclose(p.regularization() @ K / 0.5, np.eye(70), atol=1e-6)

    def test_bad_length(self):
        with pytest.raises(BadDimension):
            information_matrix(np.ones(3), problem())


class TestObjective:
    def test_scalar_d(self):
        C, s2, k = 3.0, 0.5, 0.8
        p = DesignProblem(4, 1, C, s2, KernelSpec("TC", 1, 1.0, k))
        r = np.array([C])
        assert objective_value(r, p) == pytest.approx(np.log(s2) - np.log(C + s2 / k))
        assert objective_gradient(r, p)[0] == pytest.approx(-1 / (C + s2 / k))

    def test_values_against_dense_formulas(self, rng):
        p = problem(N=12, n=4, C=12.0)
        r = random_feasible(12, 4, 12.0, seed=3)
        Sigma = 0.5 * np.linalg.inv(information_matrix(r, p))
        assert objective_value(r, p) == pytest.approx(np.log(np.linalg.det(Sigma)))
        pa = problem(N=12, n=4, C=12.0, criterion="A")
        assert objective_value(r, pa) == pytest.approx(np.trace(Sigma))
        pe = problem(N=12, n=4, C=12.0, criterion="E")
        assert objective_value(r, pe) == pytest.approx(np.linalg.eigvalsh(Sigma).max())
        pl = problem(N=12, n=4, C=12.0, criterion="E", e_variant="least")
        assert objective_value(r, pl) == pytest.approx(np.linalg.eigvalsh(Sigma).min())

    @pytest.mark.parametrize("criterion", ["D", "A", "E"])
    def test_gradient_finite_differences(self, criterion, rng):
        for s in range(50):
            N = int(rng.integers(2, 17))
            n = int(rng.integers(2, N + 1))
            p = problem(N, n, float(N), criterion)
            r = random_feasible(N, n, float(N), seed=s)
            g = objective_gradient(r, p)
            fd = fd_gradient(lambda x: objective_value(x, p), r)
            assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-3)

    @pytest.mark.parametrize("criterion", ["D", "A", "E"])
    def test_midpoint_convexity(self, criterion):
        p = problem(10, 3, 10.0, criterion)
        for s in range(40):
            r1 = random_feasible(10, 3, 10.0, seed=2 * s)
            r2 = random_feasible(10, 3, 10.0, seed=2 * s + 1)
            for a in (0.25, 0.5, 0.75):
                lhs = objective_value(a * r1 + (1 - a) * r2, p)
                rhs = a * objective_value(r1, p) + (1 - a) * objective_value(r2, p)
                assert lhs <= rhs + 1e-9


class TestVertices:
    def test_dc_and_nyquist(self):
        V = feasible_vertices(6, 4, 5.0)
        assert len(V) == 4
        np.testing.assert_allclose(V[0], [5, 5, 5, 5])
        np.testing.assert_allclose(V[-1], [5, -5, 5, -5], atol=1e-12)

    def test_simplex_projection(self, rng):
        for _ in range(20):
            y = rng.standard_normal(7) * 3
            x = project_simplex(y, 2.0)
            assert x.min() >= 0 and x.sum() == pytest.approx(2.0)
            # optimality: x minimises ||x - y|| against random feasible points
            for _ in range(10):
                z = rng.dirichlet(np.ones(7)) * 2
                assert np.linalg.norm(x - y) <= np.linalg.norm(z - y) + 1e-12


class TestSolver:
    def test_grid_search_oracle(self):
        N, n, C = 8, 2, 8.0
        p = problem(N, n, C)
        V = feasible_vertices(N, n, C)
        grid = np.arange(0, 1.0005, 1e-3)
        best = min(
            objective_value(a * V[i] + (1 - a) * V[j], p)
            for i in range(len(V))
            for j in range(i + 1, len(V))
            for a in grid
        )
        sol = solve_design(p)
        assert abs(sol.objective - best) <= 1e-4
        assert sol.objective <= best + 1e-12

    @pytest.mark.parametrize("criterion", ["D", "A", "E"])
    @pytest.mark.parametrize("N,n", [(8, 2), (12, 4)])
    def test_dominance(self, criterion, N, n):
        C = float(N)
        p = problem(N, n, C, criterion)
        sol = solve_design(p)
        assert sol.r_star[0] == pytest.approx(C)
        for v in feasible_vertices(N, n, C):
            if np.linalg.eigvalsh(information_matrix(v, p)).min() > 0:
                assert sol.objective <= objective_value(v, p) + 1e-9
        for s in range(200):
            assert sol.objective <= objective_value(random_feasible(N, n, C, seed=s), p) + 1e-9

    def test_output_is_feasible(self):
        sol = solve_design(problem(16, 5, 16.0))
        w = solve_spectrum(sol.r_star, 16)
        assert w.min() >= 0
        np.testing.assert_allclose(sol.w_star, sol.w_star[(-np.arange(16)) % 16])
        assert sol.w_star.sum() == pytest.approx(16.0)

    @pytest.mark.parametrize("criterion", ["D", "A"])
    def test_monotone_history(self, criterion):
        sol = solve_design(problem(20, 6, 20.0, criterion))
        assert np.all(np.diff(sol.history) <= 1e-12 * np.abs(sol.history[1:]))

    @pytest.mark.parametrize("criterion", ["D", "A"])
    def test_certificate(self, criterion):
        opts = SolverOptions(tol=1e-7)
        sol = solve_design(problem(24, 6, 24.0, criterion), opts)
        assert sol.certificate <= 1e-7 * (1 + abs(sol.objective))

    def test_without_line_search(self):
        p = problem(8, 2, 8.0)
        ref = solve_design(p).objective
        sol = solve_design(p, SolverOptions(line_search=False, max_iter=200_000, tol=1e-5))
        assert sol.objective == pytest.approx(ref, abs=1e-4)

    def test_scalar_order(self):
        C, s2, k = 5.0, 0.5, 0.85
        p = DesignProblem(6, 1, C, s2, KernelSpec("TC", 1, 1.0, k))
        sol = solve_design(p)
        assert sol.objective == pytest.approx(np.log(s2) - np.log(C + s2 / k))

    def test_unregularized_white_input(self):
        # without a prior, D-optimal periodic inputs have white autocovariance
        sol = solve_design(problem(12, 4, 12.0, regularized=False), SolverOptions(tol=1e-9))
        np.testing.assert_allclose(sol.r_star, [12, 0, 0, 0], atol=1e-3)

    def test_not_converged_carries_best_iterate(self):
        with pytest.raises(NotConverged) as info:
            solve_design(problem(24, 6, 24.0), SolverOptions(max_iter=3))
        assert info.value.solution.r_star[0] == pytest.approx(24.0)

    def test_least_variant_runs(self):
        sol = solve_design(problem(8, 3, 8.0, "E", e_variant="least"))
        assert sol.r_star[0] == pytest.approx(8.0)

    def test_deterministic(self):
        a = solve_design(problem(16, 4, 16.0, "E"))
        b = solve_design(problem(16, 4, 16.0, "E"))
        np.testing.assert_array_equal(a.r_star, b.r_star)


class TestProblemValidation:
    @pytest.mark.parametrize(
        "kw",
        [dict(N=3, n=4), dict(C=0.0), dict(criterion="G"), dict(e_variant="middle")],
    )
    def test_rejected(self, kw):
        args = dict(N=8, n=2, C=8.0, sigma2=0.5, kernel=KernelSpec("TC", 2))
        args.update(kw)
        if "n" in kw:
            args["kernel"] = KernelSpec("TC", kw["n"])
        with pytest.raises(ValueError):
            DesignProblem(**args)

    def test_kernel_size_mismatch(self):
        with pytest.raises(BadDimension):
            DesignProblem(8, 2, 8.0, 0.5, KernelSpec("TC", 3))
