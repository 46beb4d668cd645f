import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inputdesign import embeddings as emb
from inputdesign.errors import BadDimension, BadStructure, EnumerationTooLarge
from inputdesign.spectral import dft, dft_matrix, quadratic_map, shift_matrix

R2 = 1 / np.sqrt(2)


def relerr(a, b):
    return np.linalg.norm(np.asarray(a) - b) / max(1.0, np.linalg.norm(b))


class TestTde:
    def test_basis_orthogonal(self):
        for N in range(1, 17):
            W = emb.tde_basis(N)
            np.testing.assert_allclose(W.T @ W, np.eye(N), atol=1e-12)

    def test_n4_basis(self):
        # rows of W^T: constant, cosine, Nyquist, sine
        expected = np.array(
            [
                [0.5, 0.5, 0.5, 0.5],
                [R2, 0, -R2, 0],
                [0.5, -0.5, 0.5, -0.5],
                [0, R2, 0, -R2],
            ]
        )
        np.testing.assert_allclose(emb.tde_basis(4).T, expected, atol=1e-14)

    def test_n4_forward(self):
        e = emb.build_tde(4, 3)
        z = e.transform @ np.array([1.0, 1, -1, 1])
        np.testing.assert_allclose(e.spectrum_to_autocov @ z**2, [4, 0, 0], atol=1e-12)

    def test_cosine_entries(self):
        S = emb.cosine_matrix(7, 4)
        i, t = np.meshgrid(np.arange(4), np.arange(7), indexing="ij")
        np.testing.assert_allclose(S, np.cos(2 * np.pi * i * t / 7))

    def test_is_real(self):
        assert emb.build_tde(5, 2).is_real
        assert not emb.build_fde(5, 2).is_real


class TestFde:
    def test_soundness(self, rng):
        for _ in range(100):
            N = int(rng.integers(1, 17))
            n = int(rng.integers(1, N + 1))
            u = rng.standard_normal(N)
            e = emb.build_fde(N, n)
            assert relerr(e.forward(u), quadratic_map(u, n)) <= 1e-9

    def test_impulse(self):
        C, N = 5.0, 6
        u = np.zeros(N)
        u[0] = np.sqrt(C)
        np.testing.assert_allclose(np.abs(dft(u)) ** 2, C / N)
        np.testing.assert_allclose(emb.build_fde(N, 3).forward(u), [C, 0, 0], atol=1e-12)

    def test_first_row_ones(self):
        np.testing.assert_allclose(emb.fde_autocov_matrix(9, 4)[0], 1.0)


class TestGie:
    def test_half_is_real_cosine(self):
        S = emb.gie_autocov_matrix(8, 3, 0.5)
        assert not np.iscomplexobj(S)
        np.testing.assert_allclose(S, emb.cosine_matrix(8, 3), atol=1e-14)

    def test_gamma_one_on_symmetric_spectra(self, rng):
        N, n = 9, 4
        x = rng.random(N)
        x = x + x[(-np.arange(N)) % N]
        S1 = emb.gie_autocov_matrix(N, n, 1)
        np.testing.assert_allclose(S1 @ x, emb.fde_autocov_matrix(N, n) @ x, atol=1e-12)

    def test_symmetric_restriction(self, rng):
        for N in (4, 7, 10):
            x = rng.random(N)
            x = x + x[(-np.arange(N)) % N]
            ref = emb.fde_autocov_matrix(N, 3) @ x
            for g in (0, 0.5, 1, 0.3 + 0.7j, -2 + 5j):
                out = emb.gie_autocov_matrix(N, 3, g) @ x
                assert np.max(np.abs(out.imag)) <= 1e-10 * max(1, np.abs(ref).max())
                np.testing.assert_allclose(out, ref, atol=1e-10)

    def test_soundness_complex_gamma(self, rng):
        gammas = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        for g in gammas:
            for _ in range(100):
                N = int(rng.integers(1, 13))
                n = int(rng.integers(1, N + 1))
                u = rng.standard_normal(N)
                assert relerr(emb.build_gie(N, n, g).forward(u), quadratic_map(u, n)) <= 1e-9

    def test_given_gamma(self, rng):
        u = rng.standard_normal(8)
        r = emb.build_gie(8, 3, 0.3 + 0.7j).forward(u)
        assert relerr(r, quadratic_map(u, 3)) <= 1e-9


class TestConnector:
    def test_printed_n4(self):
        expected = np.array(
            [[1, 0, 0, 0], [0, R2, 0, R2], [0, 0, 1, 0], [0, -1j * R2, 0, 1j * R2]]
        )
        np.testing.assert_allclose(emb.build_lambda(4, ordering="printed"), expected, atol=1e-15)

    def test_unitary(self):
        for N in range(1, 17):
            for ordering in ("working", "printed"):
                L = emb.build_lambda(N, ordering)
                np.testing.assert_allclose(L.conj().T @ L, np.eye(N), atol=1e-12)

    def test_basis_identity(self):
        for N in range(3, 17):
            err = np.max(np.abs(emb.tde_basis(N).T - emb.build_lambda(N) @ dft_matrix(N)))
            assert err <= 1e-10

    def test_printed_layout_differs_by_column_swap(self):
        # the printed layout is the complex conjugate of the working one
        for N in (3, 4, 9):
            np.testing.assert_allclose(emb.build_lambda(N, "printed"), emb.build_lambda(N).conj())

    def test_cosine_identity(self):
        for N in range(3, 17):
            for n in (1, N // 2 + 1, N):
                Sf = emb.fde_autocov_matrix(N, n)
                assert np.max(np.abs(emb.cosine_matrix(N, n) - (Sf + Sf.conj()) / 2)) <= 1e-10

    def test_coordinates(self, rng):
        for _ in range(50):
            N = int(rng.integers(2, 13))
            u = rng.standard_normal(N)
            z = emb.tde_basis(N).T @ u
            np.testing.assert_allclose(emb.build_lambda(N) @ dft(u), z, atol=1e-12)

    def test_blocks_round_trip(self):
        L = emb.build_lambda(7)
        blocks = emb.connector_blocks(L)
        np.testing.assert_allclose(emb.connector_from_blocks(7, blocks), L)

    def test_bad_ordering(self):
        with pytest.raises(ValueError):
            emb.build_lambda(4, ordering="sideways")


class TestRealFamily:
    @pytest.mark.parametrize("N,count", [(1, 1), (2, 1), (3, 8), (4, 8), (5, 64), (6, 64), (7, 512)])
    def test_count(self, N, count):
        assert emb.real_embedding_count(N) == count

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_exhaustive_members_sound(self, N, rng):
        family = emb.enumerate_real_embeddings(N, N)
        assert len(family) == emb.real_embedding_count(N)
        assert len({e.label for e in family}) == len(family)
        for e in family:
            assert e.is_real
            for _ in range(20):
                u = rng.standard_normal(N)
                assert relerr(e.forward(u), quadratic_map(u, N)) <= 1e-9

    def test_index_addressing(self):
        family = emb.enumerate_real_embeddings(6, 3)
        for index in (0, 1, 8, 9, 63):
            np.testing.assert_allclose(
                family[index].transform, emb.build_real_embedding(6, 3, index).transform
            )

    def test_digit_selects_pair(self):
        # index 8*3 + 5: pair 1 gets block 5, pair 2 gets block 3
        blocks = emb.connector_blocks(emb.real_connector(6, 29))
        np.testing.assert_allclose(blocks[0], emb.REAL_BLOCKS[5])
        np.testing.assert_allclose(blocks[1], emb.REAL_BLOCKS[3])

    def test_blocks_are_unitary(self):
        for B in emb.REAL_BLOCKS:
            np.testing.assert_allclose(B.conj().T @ B, np.eye(2), atol=1e-15)

    def test_cap(self):
        with pytest.raises(EnumerationTooLarge):
            emb.enumerate_real_embeddings(30, 2, cap=1000)

    def test_index_range(self):
        with pytest.raises(ValueError):
            emb.real_connector(4, 8)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(3, 14), st.data())
    def test_random_member_sound(self, N, data):
        index = data.draw(st.integers(0, emb.real_embedding_count(N) - 1))
        assert emb.verify_embedding_identity(emb.real_connector(N, index), N, 2, trials=5)


class TestVerifyIdentity:
    def test_working_connector(self):
        for N in (3, 4, 8):
            assert emb.verify_embedding_identity(emb.build_lambda(N), N, 2)

    def test_identity_connector(self):
        assert emb.verify_embedding_identity(np.eye(5), 5, 3)

    def test_non_unitary_block(self):
        L = emb.build_lambda(6).copy()
        L[1, 1] *= 2
        with pytest.raises(BadStructure):
            emb.verify_embedding_identity(L, 6, 2)

    def test_off_pattern_entry(self):
        L = np.eye(6, dtype=complex)
        L[0, 2] = 0.1
        with pytest.raises(BadStructure):
            emb.verify_embedding_identity(L, 6, 2)

    def test_shape_mismatch(self):
        with pytest.raises(BadStructure):
            emb.verify_embedding_identity(np.eye(4), 5, 2)


class TestMirrorGraph:
    def test_n4_eigenvalues(self):
        vals, _ = emb.mirror_graph_spectrum(4)
        np.testing.assert_allclose(vals, [1, 0, -1, 0], atol=1e-15)

    def test_basis_diagonalizes(self):
        for N in (3, 4, 8, 11):
            vals, W = emb.mirror_graph_spectrum(N)
            A = shift_matrix(N)
            np.testing.assert_allclose(W.T @ ((A + A.T) / 2) @ W, np.diag(vals), atol=1e-12)

    def test_cosine_entries_are_shift_eigenvalues(self):
        N, n = 9, 5
        S = emb.cosine_matrix(N, n)
        W = emb.tde_basis(N)
        for i in range(n):
            D = W.T @ emb.symmetrized_shift(N, i) @ W
            np.testing.assert_allclose(D, np.diag(S[i]), atol=1e-12)


def test_bad_dimensions():
    with pytest.raises(BadDimension):
        emb.build_tde(3, 4)
    with pytest.raises(BadDimension):
        emb.build_fde(3, 0)
