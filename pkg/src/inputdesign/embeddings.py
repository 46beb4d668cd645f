"""Embedding pairs that factor the autocovariance map ``u -> r``.

An embedding is a pair ``(T, M)`` with ``r = M @ |T @ u|**2`` for every
input ``u``.  Provided here:

* time domain   ``(W^T, S)``           real cosine/sine basis
* frequency     ``(Wf, Sf)``           unitary DFT
* graph induced ``(Wf, Sf(gamma))``    weighted forward/backward ring shift
* real family   ``(L @ Wf, Sf(1/2))``  L block-unitary on frequency pairs

Bins ``k`` and ``N-k`` form a *frequency pair*; for ``1 <= k <= (N-1)//2``
each pair owns one 2x2 block of a connector matrix.  Bin 0 (and bin N/2 for
even N) is left alone.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, BadStructure, EnumerationTooLarge
from .spectral import dft_matrix, quadratic_map, shift_matrix

UNITARY_TOL = 1e-10
IMAG_TOL = 1e-10
DEFAULT_ENUMERATION_CAP = 10**6

_R = 1 / np.sqrt(2)
# The eight 2x2 blocks that make L @ Wf real, in their canonical order.
REAL_BLOCKS = (
    np.array([[_R, _R], [-1j * _R, 1j * _R]]),
    np.array([[-_R, -_R], [-1j * _R, 1j * _R]]),
    np.array([[_R, _R], [1j * _R, -1j * _R]]),
    np.array([[-_R, -_R], [1j * _R, -1j * _R]]),
    np.array([[-1j * _R, 1j * _R], [_R, _R]]),
    np.array([[-1j * _R, 1j * _R], [-_R, -_R]]),
    np.array([[1j * _R, -1j * _R], [_R, _R]]),
    np.array([[1j * _R, -1j * _R], [-_R, -_R]]),
)


@dataclass(frozen=True)
class Embedding:
    """Factorisation ``r = spectrum_to_autocov @ |transform @ u|**2``."""

    transform: np.ndarray
    spectrum_to_autocov: np.ndarray
    label: str

    @property
    def N(self):
        return self.transform.shape[1]

    @property
    def n(self):
        return self.spectrum_to_autocov.shape[0]

    @property
    def is_real(self):
        return not (
            np.iscomplexobj(self.transform) or np.iscomplexobj(self.spectrum_to_autocov)
        )

    def forward(self, u):
        """Autocovariance of ``u`` computed through the embedding."""
        z2 = np.abs(self.transform @ np.asarray(u, dtype=float)) ** 2
        r = self.spectrum_to_autocov @ z2
        if np.iscomplexobj(r):
            scale = max(1.0, float(np.max(np.abs(r))))
            if np.max(np.abs(r.imag)) > IMAG_TOL * scale:
                raise ValueError(
                    f"embedding {self.label} produced complex r "
                    f"(imag {np.max(np.abs(r.imag)):.2e})"
                )
            r = r.real
        return r


def num_pairs(N):
    """Number of frequency pairs ``(k, N-k)`` with ``k != N-k``, k >= 1."""
    return (N - 1) // 2


def _check_dims(N, n):
    if not 1 <= n <= N:
        raise BadDimension(f"need 1 <= n <= N, got n={n}, N={N}")


def _xi(N, j):
    return np.cos(2 * np.pi * ((j * np.arange(N)) % N) / N)


def _zeta(N, j):
    return np.sin(2 * np.pi * ((j * np.arange(N)) % N) / N)


def cosine_matrix(N, n):
    """``S`` with entry (i, t) = cos(2 pi i t / N), shape (n, N)."""
    i, t = np.arange(n)[:, None], np.arange(N)[None, :]
    return np.cos(2 * np.pi * ((i * t) % N) / N)


def tde_basis(N):
    """Orthogonal ``W`` whose columns are the normalised cosine/sine vectors.

    Column 0 is the constant vector, column k (1 <= k < N/2) the cosine at
    frequency k, column N-k the sine at frequency k, and column N/2 (even N
    only) the alternating vector.
    """
    if N < 1:
        raise BadDimension("N must be >= 1")
    W = np.empty((N, N))
    W[:, 0] = _xi(N, 0) / np.sqrt(N)
    scale = np.sqrt(2 / N)
    for k in range(1, num_pairs(N) + 1):
        W[:, k] = scale * _xi(N, k)
        W[:, N - k] = scale * _zeta(N, k)
    if N % 2 == 0:
        W[:, N // 2] = _xi(N, N // 2) / np.sqrt(N)
    return W


def build_tde(N, n):
    _check_dims(N, n)
    return Embedding(tde_basis(N).T, cosine_matrix(N, n), "tde")


def fde_autocov_matrix(N, n):
    """``Sf`` with entry (i, k) = exp(j 2 pi i k / N)."""
    i, k = np.arange(n)[:, None], np.arange(N)[None, :]
    return np.exp(2j * np.pi * ((i * k) % N) / N)


def build_fde(N, n):
    _check_dims(N, n)
    return Embedding(dft_matrix(N), fde_autocov_matrix(N, n), "fde")


def gie_autocov_matrix(N, n, gamma):
    """``Sf(gamma)`` with entry (i, k) = g exp(-j w k i) + (1 - g) exp(j w k i)."""
    gamma = complex(gamma)
    i, k = np.arange(n)[:, None], np.arange(N)[None, :]
    phase = 2 * np.pi * ((i * k) % N) / N
    M = gamma * np.exp(-1j * phase) + (1 - gamma) * np.exp(1j * phase)
    if gamma == 0.5:
        return M.real.copy()
    return M


def build_gie(N, n, gamma):
    _check_dims(N, n)
    return Embedding(dft_matrix(N), gie_autocov_matrix(N, n, gamma), f"gie({complex(gamma)})")


def _pair_permutation(N):
    """Permutation matrix exchanging bins k and N-k."""
    return np.eye(N)[(-np.arange(N)) % N]


def build_lambda(N, ordering="working"):
    """Connector between the DFT and the cosine/sine basis.

    With the default ``ordering="working"`` the result satisfies
    ``W^T == L @ Wf`` and ``z == L @ U`` exactly.  ``ordering="printed"``
    returns the conventional layout whose sine rows read
    ``[-j/sqrt2 at k, +j/sqrt2 at N-k]``; it equals the working connector
    with columns k and N-k exchanged, i.e. it is the connector for the DFT
    taken with the opposite sign of the exponent.
    """
    if N < 1:
        raise BadDimension("N must be >= 1")
    L = np.zeros((N, N), dtype=complex)
    L[0, 0] = 1
    if N % 2 == 0:
        L[N // 2, N // 2] = 1
    for k in range(1, num_pairs(N) + 1):
        L[k, k] = L[k, N - k] = _R
        L[N - k, k] = -1j * _R
        L[N - k, N - k] = 1j * _R
    if ordering == "printed":
        return L
    if ordering == "working":
        return L @ _pair_permutation(N)
    raise ValueError(f"unknown ordering {ordering!r}")


def connector_from_blocks(N, blocks):
    """Assemble a member of the block-unitary family from one 2x2 block per pair."""
    blocks = list(blocks)
    if len(blocks) != num_pairs(N):
        raise BadStructure(f"N={N} needs {num_pairs(N)} blocks, got {len(blocks)}")
    L = np.zeros((N, N), dtype=complex)
    L[0, 0] = 1
    if N % 2 == 0:
        L[N // 2, N // 2] = 1
    for k, Q in enumerate(blocks, start=1):
        Q = np.asarray(Q)
        L[k, k], L[k, N - k] = Q[0]
        L[N - k, k], L[N - k, N - k] = Q[1]
    return L


def connector_blocks(L):
    """Split a connector into its 2x2 pair blocks.

    Raises
    ------
    BadStructure
        If ``L`` has weight outside the pair pattern, does not fix bin 0 (and
        N/2), or a block is not unitary.
    """
    L = np.asarray(L, dtype=complex)
    N = L.shape[0]
    if L.shape != (N, N):
        raise BadStructure(f"connector must be square, got {L.shape}")
    mask = np.zeros((N, N), dtype=bool)
    mask[0, 0] = True
    if N % 2 == 0:
        mask[N // 2, N // 2] = True
    blocks = []
    for k in range(1, num_pairs(N) + 1):
        idx = np.ix_([k, N - k], [k, N - k])
        mask[idx] = True
        Q = L[idx]
        if np.max(np.abs(Q.conj().T @ Q - np.eye(2))) > UNITARY_TOL:
            raise BadStructure(f"block for pair ({k}, {N - k}) is not unitary")
        blocks.append(Q)
    if np.max(np.abs(L[~mask]), initial=0.0) > UNITARY_TOL:
        raise BadStructure("connector has entries outside the frequency-pair pattern")
    fixed = [0] + ([N // 2] if N % 2 == 0 else [])
    if any(abs(L[b, b] - 1) > UNITARY_TOL for b in fixed):
        raise BadStructure("connector must act as identity on bin 0 (and N/2)")
    return blocks


def real_embedding_count(N):
    return 8 ** num_pairs(N)


def real_connector(N, index):
    """Connector addressed by a base-8 integer; digit p (least significant first)
    selects the block of pair ``p + 1`` from ``REAL_BLOCKS``."""
    m = num_pairs(N)
    if not 0 <= index < 8**m:
        raise ValueError(f"index {index} outside 0..{8**m - 1}")
    digits = [(index // 8**p) % 8 for p in range(m)]
    return connector_from_blocks(N, [REAL_BLOCKS[d] for d in digits])


def build_real_embedding(N, n, index):
    _check_dims(N, n)
    T = real_connector(N, index) @ dft_matrix(N)
    if np.max(np.abs(T.imag)) > IMAG_TOL:
        raise AssertionError("real-family transform has an imaginary part")
    return Embedding(T.real.copy(), cosine_matrix(N, n), f"real:{np.base_repr(index, 8)}")


def enumerate_real_embeddings(N, n, cap=DEFAULT_ENUMERATION_CAP):
    """All real members ``(L @ Wf, Sf(1/2))`` of the block-unitary family."""
    _check_dims(N, n)
    count = real_embedding_count(N)
    if count > cap:
        raise EnumerationTooLarge(f"{count} real embeddings for N={N} exceeds cap {cap}")
    Wf = dft_matrix(N)
    S = cosine_matrix(N, n)
    out = []
    for index, choice in enumerate(itertools.product(range(8), repeat=num_pairs(N))):
        # itertools varies the last position fastest; reverse so digit p is pair p+1
        L = connector_from_blocks(N, [REAL_BLOCKS[d] for d in reversed(choice)])
        T = L @ Wf
        if np.max(np.abs(T.imag)) > IMAG_TOL:
            raise AssertionError("real-family transform has an imaginary part")
        out.append(Embedding(T.real.copy(), S, f"real:{np.base_repr(index, 8)}"))
    return out


def verify_embedding_identity(L, N, n, trials=50, seed=0, tol=1e-9):
    """Check that ``(L @ Wf, Sf(1/2))`` reproduces the autocovariance map.

    ``L`` must have the frequency-pair block layout (else ``BadStructure``).
    Returns True iff the forward map agrees with the direct cyclic sum on a
    random battery within relative ``tol``.
    """
    L = np.asarray(L, dtype=complex)
    if L.shape != (N, N):
        raise BadStructure(f"connector shape {L.shape} does not match N={N}")
    connector_blocks(L)
    _check_dims(N, n)
    T = L @ dft_matrix(N)
    S = cosine_matrix(N, n)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        u = rng.standard_normal(N)
        r = quadratic_map(u, n)
        r_emb = S @ (np.abs(T @ u) ** 2)
        if np.linalg.norm(r_emb - r) > tol * max(1.0, np.linalg.norm(r)):
            return False
    return True


def mirror_graph_spectrum(N):
    """Eigenpairs of the mirror ring ``(A + A^T)/2``.

    Eigenvalue t is ``cos(2 pi t / N)`` with eigenvector column t of the
    cosine/sine basis ``W`` (columns t and N-t share the eigenvalue).
    """
    W = tde_basis(N)
    return _xi(N, 1), W


def symmetrized_shift(N, i):
    """``(A^i + (A^T)^i) / 2`` for the ring shift ``A``."""
    Ai = np.linalg.matrix_power(shift_matrix(N), i)
    return (Ai + Ai.T) / 2
