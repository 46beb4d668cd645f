"""Inverse embeddings: recover inputs whose cyclic autocovariance equals ``r``.

Every route runs the same three steps:

1. find spectral weights ``w = |U|**2`` (nonnegative, ``w[k] == w[N-k]``)
   with ``Sf @ w == r``;
2. lift to a spectrum (frequency routes: square roots plus phases) or to a
   real coordinate vector ``z`` (time-domain route: square roots plus signs);
3. map back to the time domain.

Because the weights are symmetric, the feasibility system folds onto the
half spectrum ``x`` with ``x[0] = w[0]``, ``x[k] = 2 w[k]`` for
``1 <= k < N/2`` and ``x[N/2] = w[N/2]``; the folded matrix has entries
``cos(2 pi i k / N)``.
"""

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .embeddings import build_lambda, gie_autocov_matrix, num_pairs, tde_basis
from .errors import (
    BadDimension,
    BadPhaseCount,
    DegenerateNegative,
    Infeasible,
    SymmetryViolation,
)
from .spectral import dft_matrix, idft, is_conjugate_symmetric, quadratic_map

RESIDUAL_TOL = 1e-8  # relative to C, required of returned weights
INFEASIBLE_TOL = 1e-6  # relative to C, above this r is declared outside the polytope
NEGATIVE_TOL = 1e-8
MEMBERSHIP_TOL = 1e-6
IMAG_TOL = 1e-10


def half_length(N):
    return N // 2 + 1


def reduced_matrix(N, n, gamma=None):
    """Fold the columns of ``Sf(gamma)`` onto the half spectrum.

    Column k of the result is ``(M[:, k] + M[:, N-k]) / 2`` for paired bins
    and ``M[:, k]`` for bin 0 and N/2, where ``M = Sf(gamma)``
    (``gamma=None`` means ``Sf`` itself).  The imaginary parts cancel for
    every gamma; they are checked and dropped.
    """
    if gamma is None:
        i, k = np.arange(n)[:, None], np.arange(N)[None, :]
        M = np.exp(2j * np.pi * ((i * k) % N) / N)
    else:
        M = gie_autocov_matrix(N, n, gamma).astype(complex)
    H = half_length(N)
    R = np.empty((n, H), dtype=complex)
    R[:, 0] = M[:, 0]
    for k in range(1, H):
        R[:, k] = M[:, k] if 2 * k == N else (M[:, k] + M[:, N - k]) / 2
    scale = max(1.0, float(np.max(np.abs(R))))
    if np.max(np.abs(R.imag)) > IMAG_TOL * scale:
        raise AssertionError("folded autocovariance matrix is not real")
    return R.real.copy()


def half_to_full(x, N):
    """Expand half-spectrum coordinates to symmetric full weights."""
    x = np.asarray(x, dtype=float)
    w = np.empty(N)
    w[0] = x[0]
    for k in range(1, half_length(N)):
        if 2 * k == N:
            w[k] = x[k]
        else:
            w[k] = w[N - k] = x[k] / 2
    return w


def full_to_half(w):
    w = np.asarray(w, dtype=float)
    N = w.size
    x = np.empty(half_length(N))
    x[0] = w[0]
    for k in range(1, half_length(N)):
        x[k] = w[k] if 2 * k == N else w[k] + w[N - k]
    return x


def nnls_projected_gradient(A, b, x0, max_iter=100_000, res_tol=1e-10, grad_tol=1e-12):
    """Accelerated projected gradient for ``min ||A x - b||^2, x >= 0``.

    Uses Nesterov momentum with adaptive restart.  Stops once
    ``||A x - b|| <= res_tol`` or the projected-gradient step length falls
    below ``grad_tol``.

    Returns
    -------
    x : ndarray
    residual : float
    iterations : int
    """
    G = A.T @ A
    h = A.T @ b
    step = 1.0 / np.linalg.norm(A, 2) ** 2
    x = np.maximum(np.asarray(x0, dtype=float), 0.0)
    y = x.copy()
    t = 1.0
    residual = np.linalg.norm(A @ x - b)
    it = 0
    for it in range(1, max_iter + 1):
        x_new = np.maximum(y - step * (G @ y - h), 0.0)
        if (y - x_new) @ (x_new - x) > 0:
            # momentum is pushing uphill: restart
            t = 1.0
            y = x_new
        else:
            t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
            y = x_new + ((t - 1) / t_new) * (x_new - x)
            t = t_new
        moved = np.linalg.norm(x_new - x)
        x = x_new
        if it % 10 == 0 or moved <= grad_tol:
            residual = np.linalg.norm(A @ x - b)
            if residual <= res_tol:
                break
            pg = np.linalg.norm(x - np.maximum(x - step * (G @ x - h), 0.0))
            if pg <= grad_tol:
                break
    residual = np.linalg.norm(A @ x - b)
    return x, residual, it


def _polish(A, b, x, zero_tol):
    """Least-squares correction of ``x`` on its support.

    Supports are taken at a ladder of thresholds relative to ``max(x)``,
    starting at ``zero_tol``; the sparsest one whose correction stays
    nonnegative without raising the residual is kept.  This snaps weights
    that projected gradient leaves at ~1e-10 on vertex points to zero.
    """
    best = x
    best_res = np.linalg.norm(A @ x - b)
    floor = 1e-13 * max(1.0, np.linalg.norm(b))
    top = x.max(initial=0.0)
    for rel in (zero_tol, 1e-9, 1e-6):
        support = x > rel * top
        if not support.any():
            continue
        candidate = np.zeros_like(x)
        candidate[support] = x[support]
        delta = np.linalg.lstsq(A[:, support], b - A @ candidate, rcond=None)[0]
        candidate[support] += delta
        if candidate.min() < 0:
            continue
        res = np.linalg.norm(A @ candidate - b)
        if res <= max(best_res, floor):
            best, best_res = candidate, res
    return best


def _check_r(r, N):
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise BadDimension("r must be a non-empty vector")
    if N < r.size:
        raise BadDimension(f"need N >= n, got N={N}, n={r.size}")
    if r[0] < 0:
        raise Infeasible("r[0] is the input power and cannot be negative")
    return r


def solve_spectrum(r, N, seed=0, gamma=None, max_iter=100_000):
    """Symmetric nonnegative spectral weights ``w`` with ``Sf(gamma) @ w == r``.

    For ``N == n`` the weights are the closed form ``R / sqrt(n)`` with ``R``
    the unitary DFT of ``r``.  For ``N < 2n`` the folded system has full
    column rank and its unique solution is returned.  Otherwise the solution
    set is a polytope of positive dimension; it is sampled by running
    projected gradient from a Dirichlet(1) point of the power simplex drawn
    from ``seed``, so different seeds give different members.

    Raises
    ------
    Infeasible
        Best residual exceeds ``1e-6 * r[0]``.
    DegenerateNegative
        A closed-form or unique solution has weights below ``-1e-8 * r[0]``.
    """
    r = _check_r(r, N)
    n = r.size
    C = float(r[0])
    scale = C if C > 0 else 1.0
    H = half_length(N)
    A = reduced_matrix(N, n, gamma)

    if N == n:
        R = dft_matrix(n) @ r
        if np.max(np.abs(R.imag)) > INFEASIBLE_TOL * scale:
            raise Infeasible("r is not symmetric under i -> N - i", np.max(np.abs(R.imag)))
        w = R.real / np.sqrt(n)
        x = full_to_half(w)
    elif H <= n:
        x = np.linalg.lstsq(A, r, rcond=None)[0]
    else:
        x0 = rngmod.stream(seed, rngmod.SOLVER_START).dirichlet(np.ones(H))
        x, _, _ = nnls_projected_gradient(A, r / scale, x0, max_iter=max_iter)
        x = _polish(A, r / scale, x, 1e-12) * scale

    if x.min() < -NEGATIVE_TOL * scale:
        residual = float(np.linalg.norm(A @ np.maximum(x, 0) - r))
        if residual > INFEASIBLE_TOL * scale:
            raise Infeasible(f"no nonnegative spectrum matches r (residual {residual:.3e})", residual)
        raise DegenerateNegative(f"spectral weight {x.min():.3e} is negative")
    x = np.maximum(x, 0.0)
    residual = float(np.linalg.norm(A @ x - r))
    if residual > INFEASIBLE_TOL * scale:
        raise Infeasible(f"r is not an attainable autocovariance (residual {residual:.3e})", residual)
    return half_to_full(x, N)


@dataclass(frozen=True)
class PhaseAssignment:
    """Free parameters that lift magnitudes to a real-signal spectrum.

    ``signs`` holds the sign of bin 0 and, for even N, of bin N/2.
    ``phases[k-1]`` is the angle of bin k for ``1 <= k <= (N-1)//2``.
    """

    signs: tuple
    phases: np.ndarray

    def check(self, N):
        expected = 2 if N % 2 == 0 else 1
        if len(self.signs) != expected or len(self.phases) != num_pairs(N):
            raise BadPhaseCount(
                f"N={N} needs {expected} signs and {num_pairs(N)} phases, "
                f"got {len(self.signs)} and {len(self.phases)}"
            )
        if any(s not in (1, -1) for s in self.signs):
            raise BadPhaseCount("signs must be +1 or -1")
        phases = np.asarray(self.phases, dtype=float)
        if phases.size and (phases.min() < 0 or phases.max() >= 2 * np.pi):
            raise BadPhaseCount("phases must lie in [0, 2 pi)")


def zero_phases(N):
    return PhaseAssignment((1,) * (2 if N % 2 == 0 else 1), np.zeros(num_pairs(N)))


def random_phases(N, seed):
    """Uniform phases on [0, 2 pi) and uniform signs, from the seed's phase stream."""
    g = rngmod.stream(seed, rngmod.PHASES)
    phases = g.uniform(0.0, 2 * np.pi, num_pairs(N))
    signs = tuple(int(s) for s in g.choice([-1, 1], size=2 if N % 2 == 0 else 1))
    return PhaseAssignment(signs, phases)


def assign_phases(w, p):
    """Spectrum with magnitudes ``sqrt(w)`` and the phases/signs of ``p``."""
    w = np.asarray(w, dtype=float)
    N = w.size
    p.check(N)
    mag = np.sqrt(np.maximum(w, 0.0))
    U = np.zeros(N, dtype=complex)
    U[0] = p.signs[0] * mag[0]
    if N % 2 == 0:
        U[N // 2] = p.signs[1] * mag[N // 2]
    for k in range(1, num_pairs(N) + 1):
        U[k] = mag[k] * np.exp(1j * p.phases[k - 1])
        U[N - k] = np.conj(U[k])
    return U


def giie(r, N, gamma=0.5, phases=None, seed=0, weights=None):
    """Graph-induced inverse: one input with autocovariance ``r``.

    ``gamma`` selects ``Sf(gamma)`` in the feasibility step.  ``phases``
    defaults to a random assignment from ``seed``.  Pre-computed ``weights``
    skip the feasibility step.
    """
    if weights is None:
        weights = solve_spectrum(r, N, seed=seed, gamma=gamma)
    if phases is None:
        phases = random_phases(N, seed)
    return idft(assign_phases(weights, phases))


def fdie(r, N, phases=None, seed=0, weights=None):
    """Frequency-domain inverse: feasibility with ``Sf``, then phases, then inverse DFT."""
    if weights is None:
        weights = solve_spectrum(r, N, seed=seed, gamma=None)
    if phases is None:
        phases = random_phases(N, seed)
    return idft(assign_phases(weights, phases))


def random_tde_params(N, seed):
    """Uniform coordinate signs and uniform pair splits from the seed's split stream."""
    g = rngmod.stream(seed, rngmod.TDE_SPLIT)
    signs = g.choice([-1, 1], size=N)
    split = g.uniform(0.0, 1.0, num_pairs(N))
    return signs, split


def tde_coordinates(weights, signs, split):
    """Real coordinates ``z`` with ``z[k]**2 + z[N-k]**2 == 2 w[k]``."""
    w = np.asarray(weights, dtype=float)
    N = w.size
    z2 = np.empty(N)
    z2[0] = w[0]
    if N % 2 == 0:
        z2[N // 2] = w[N // 2]
    for k in range(1, num_pairs(N) + 1):
        total = 2 * w[k]
        z2[k] = split[k - 1] * total
        z2[N - k] = (1 - split[k - 1]) * total
    return np.asarray(signs, dtype=float) * np.sqrt(np.maximum(z2, 0.0))


def tdie(r, N, signs=None, seed=0, split=None, weights=None):
    """Time-domain inverse: ``u = W z`` with ``S z**2 == r``.

    The squared coordinates come from the same spectral weights as the
    frequency routes (``z[k]**2 + z[N-k]**2 = 2 w[k]``); how each pair's
    weight is divided between its cosine and sine coordinate is given by
    ``split`` (default random from ``seed``), and ``signs`` picks the sign
    of every coordinate (default random from ``seed``).
    """
    if weights is None:
        weights = solve_spectrum(r, N, seed=seed)
    if signs is None or split is None:
        default_signs, default_split = random_tde_params(N, seed)
        signs = default_signs if signs is None else signs
        split = default_split if split is None else split
    signs = np.asarray(signs)
    if signs.shape != (N,) or not np.all(np.isin(signs, (-1, 1))):
        raise BadDimension(f"signs must be N={N} values in {{-1, +1}}")
    z = tde_coordinates(weights, signs, split)
    return tde_basis(N) @ z


def cross_map_fde_to_tde(U):
    """``z = L @ U``: real coordinates of the same input in the cosine/sine basis."""
    U = np.asarray(U, dtype=complex)
    if not is_conjugate_symmetric(U):
        raise SymmetryViolation("spectrum is not conjugate symmetric")
    z = build_lambda(U.size) @ U
    return z.real.copy()


def cross_map_tde_to_fde(z):
    """``U = L^H @ z``: DFT of the input ``W z``."""
    z = np.asarray(z, dtype=float)
    return build_lambda(z.size).conj().T @ z


def phases_from_spectrum(U):
    """The phase assignment that reproduces ``U`` from its magnitudes."""
    U = np.asarray(U, dtype=complex)
    N = U.size
    signs = [1 if U[0].real >= 0 else -1]
    if N % 2 == 0:
        signs.append(1 if U[N // 2].real >= 0 else -1)
    phases = np.mod(np.angle(U[1 : num_pairs(N) + 1]), 2 * np.pi)
    phases[phases >= 2 * np.pi] = 0.0
    return PhaseAssignment(tuple(signs), phases)


def tde_params_from_coordinates(z):
    """Signs and pair splits that reproduce ``z`` through ``tde_coordinates``."""
    z = np.asarray(z, dtype=float)
    N = z.size
    signs = np.where(z >= 0, 1, -1)
    split = np.empty(num_pairs(N))
    for k in range(1, num_pairs(N) + 1):
        total = z[k] ** 2 + z[N - k] ** 2
        split[k - 1] = z[k] ** 2 / total if total > 0 else 0.5
    return signs, split


@dataclass(frozen=True)
class Membership:
    l1: float
    scaled: float
    residual: float
    passed: bool


def membership_check(u, r, tol=MEMBERSHIP_TOL):
    """Plot coordinates ``(||u||_1, (||f(u) - r||_2 + 1) ||u||_1)`` and pass flag.

    An exact member lands on ``y = x``.  Passes iff the relative gap
    ``(scaled - l1) / l1``, which equals ``||f(u) - r||_2``, is at most ``tol``.
    """
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    residual = float(np.linalg.norm(quadratic_map(u, r.size) - r))
    l1 = float(np.sum(np.abs(u)))
    scaled = (residual + 1.0) * l1
    return Membership(l1, scaled, residual, residual <= tol)


def affine_solution_dimension(N, n, gamma=None):
    """Dimension of ``{x : A x = r}`` for the folded matrix ``A`` (columns minus rank)."""
    A = reduced_matrix(N, n, gamma)
    return A.shape[1] - int(np.linalg.matrix_rank(A))
