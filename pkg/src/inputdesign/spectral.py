"""DFT pair, cyclic autocovariance, and circulant/Toeplitz utilities.

All transforms use the unitary convention

    U_k = N^{-1/2} sum_t u_t exp(-j w k t),    u_t = N^{-1/2} sum_k U_k exp(j w k t)

with ``w = 2 pi / N``, so Parseval holds without extra factors.  Lags are
cyclic: ``u_{t-i}`` means ``u[(t - i) % N]``.
"""

import numpy as np
import scipy.linalg

from .errors import BadDimension, NotPSD, SymmetryViolation

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-8


def _as_vector(x, dtype=float):
    x = np.asarray(x, dtype=dtype)
    if x.ndim != 1 or x.size < 1:
        raise BadDimension(f"expected a non-empty vector, got shape {x.shape}")
    return x


def dft_matrix(N):
    """Unitary DFT matrix with entry (k, t) = exp(-j 2 pi k t / N) / sqrt(N)."""
    if N < 1:
        raise BadDimension("N must be >= 1")
    k = np.arange(N)
    # reduce k*t mod N before the exponential to keep the phase exact
    return np.exp(-2j * np.pi * (np.outer(k, k) % N) / N) / np.sqrt(N)


def dft(u, method="dense"):
    """Unitary DFT of one input period.

    ``method="dense"`` is the O(N^2) reference; ``"fft"`` uses numpy's FFT
    with the same normalisation.
    """
    u = _as_vector(u)
    if method == "dense":
        return dft_matrix(u.size) @ u
    if method == "fft":
        return np.fft.fft(u, norm="ortho")
    raise ValueError(f"unknown method {method!r}")


def conjugate_symmetry_error(U):
    """Largest ``|U[N-k] - conj(U[k])|`` over ``k = 0..N-1`` (index mod N)."""
    U = np.asarray(U, dtype=complex)
    mirrored = np.conj(U[(-np.arange(U.size)) % U.size])
    return float(np.max(np.abs(U - mirrored))) if U.size else 0.0


def is_conjugate_symmetric(U, tol=SYMMETRY_TOL):
    U = np.asarray(U, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(U))))
    return conjugate_symmetry_error(U) <= tol * scale


def idft(U, method="dense"):
    """Inverse unitary DFT of a conjugate-symmetric spectrum; returns a real vector.

    Raises
    ------
    SymmetryViolation
        If ``U[N-k] != conj(U[k])`` beyond tolerance, since the result would
        then be complex.
    """
    U = _as_vector(U, dtype=complex)
    if not is_conjugate_symmetric(U):
        raise SymmetryViolation(
            f"spectrum violates conjugate symmetry by {conjugate_symmetry_error(U):.3e}"
        )
    if method == "dense":
        u = dft_matrix(U.size).conj().T @ U
    elif method == "fft":
        u = np.fft.ifft(U, norm="ortho")
    else:
        raise ValueError(f"unknown method {method!r}")
    return u.real.copy()


def quadratic_map(u, n):
    """Cyclic autocovariance ``r_i = sum_t u_t u_{(t-i) mod N}`` for ``i < n``."""
    u = _as_vector(u)
    N = u.size
    if not 1 <= n <= N:
        raise BadDimension(f"need 1 <= n <= N, got n={n}, N={N}")
    return np.array([u @ np.roll(u, i) for i in range(n)])


def shift_matrix(N):
    """Adjacency of the directed ring: ``A @ u = [u_{N-1}, u_0, ..., u_{N-2}]``."""
    return np.roll(np.eye(N), 1, axis=0)


def circulant(generator):
    """Dense circulant whose first row is ``generator`` (row m is the row shifted m places right)."""
    b = np.asarray(generator)
    N = b.size
    idx = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    return b[idx]


def circulant_eig(generator):
    """Closed-form eigendecomposition of ``circulant(generator)``.

    Returns ``(tau, V)`` with ``tau[m] = sum_k b_k exp(-j w m k)`` and column m
    of ``V`` equal to ``N^{-1/2} [1, exp(-j w m), ..., exp(-j w (N-1) m)]``,
    so that ``circulant(b) == V @ diag(tau) @ V^H``.
    """
    b = _as_vector(generator, dtype=complex)
    V = dft_matrix(b.size)  # symmetric, so its columns are the eigenvectors
    tau = np.sqrt(b.size) * (V @ b)
    return tau, V


def toeplitz_from_autocov(r, check_psd=True, tol=PSD_TOL):
    """Symmetric Toeplitz Gram matrix with entry (i, j) = ``r[|i-j|]``.

    Raises
    ------
    NotPSD
        If ``check_psd`` and the smallest eigenvalue is below ``-tol * r[0]``.
    """
    r = _as_vector(r)
    T = scipy.linalg.toeplitz(r)
    if check_psd:
        lam_min = float(np.linalg.eigvalsh(T)[0])
        if lam_min < -tol * abs(r[0]):
            raise NotPSD(f"Toeplitz matrix has eigenvalue {lam_min:.3e} < 0")
    return T


def graph_shift_power_form(u, i, gamma=None):
    """``u^T A^i u`` for the ring shift A, or ``u^T (g A^i + (1-g) (A^T)^i) u`` given ``gamma``."""
    u = _as_vector(u)
    N = u.size
    if not 0 <= i < N:
        raise BadDimension(f"lag {i} outside 0..{N - 1}")
    forward = u @ np.roll(u, i)  # A^i u is u delayed i steps
    if gamma is None:
        return float(forward)
    backward = u @ np.roll(u, -i)
    return gamma * forward + (1 - gamma) * backward
