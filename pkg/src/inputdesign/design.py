"""Optimal input autocovariance for regularized FIR identification.

The design problem is posed over the half-spectrum weights ``x >= 0`` with
``sum(x) == C``; the autocovariance is the linear image ``r = A @ x`` with
``A[i, k] = cos(2 pi i k / N)``.  Vertex k of the feasible autocovariance
polytope is ``C * A[:, k]``, the image of an input concentrated at
frequency k.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import rng as rngmod
from .errors import BadDimension, BadHyperparameter, NotConverged, NotPSD
from .inversion import half_length, half_to_full, reduced_matrix
from .spectral import quadratic_map, toeplitz_from_autocov

CRITERIA = ("D", "A", "E")


@dataclass(frozen=True)
class KernelSpec:
    """Prior covariance of the impulse response.

    ``family`` is ``"TC"`` (params ``scale, decay``), ``"DC"`` (params
    ``scale, decay, correlation``) or ``"custom"`` (``matrix``).
    """

    family: str
    n: int
    scale: float = 1.0
    decay: float = 0.85
    correlation: float = 0.0
    matrix: np.ndarray = None

    def realize(self):
        return realize_kernel(self)


def realize_kernel(k):
    """Dense kernel matrix, 1-based indices ``i, j``.

    TC: ``scale * decay**max(i, j)``;
    DC: ``scale * decay**((i + j) / 2) * correlation**|i - j|``.
    """
    if k.n < 1:
        raise BadDimension("kernel dimension must be >= 1")
    idx = np.arange(1, k.n + 1)
    family = k.family.upper()
    if family in ("TC", "DC"):
        if not k.scale > 0:
            raise BadHyperparameter(f"scale must be > 0, got {k.scale}")
        if not 0 < k.decay < 1:
            raise BadHyperparameter(f"decay must lie in (0, 1), got {k.decay}")
    if family == "TC":
        K = k.scale * k.decay ** np.maximum.outer(idx, idx)
    elif family == "DC":
        if not -1 < k.correlation < 1:
            raise BadHyperparameter(f"correlation must lie in (-1, 1), got {k.correlation}")
        K = (
            k.scale
            * k.decay ** (np.add.outer(idx, idx) / 2)
            * k.correlation ** np.abs(np.subtract.outer(idx, idx))
        )
    elif family == "CUSTOM":
        if k.matrix is None:
            raise BadHyperparameter("custom kernel needs a matrix")
        K = np.asarray(k.matrix, dtype=float)
        if K.shape != (k.n, k.n):
            raise BadHyperparameter(f"custom kernel must be {k.n}x{k.n}, got {K.shape}")
        if not np.allclose(K, K.T, rtol=0, atol=1e-12 * np.max(np.abs(K))):
            raise BadHyperparameter("custom kernel is not symmetric")
    else:
        raise BadHyperparameter(f"unknown kernel family {k.family!r}")
    eig = np.linalg.eigvalsh(K)
    if eig[0] <= 1e-12 * eig[-1]:
        raise BadHyperparameter("kernel matrix is not positive definite")
    return K


@dataclass(frozen=True)
class DesignProblem:
    """Minimise a scalar measure of ``sigma2 * inv(P)``, ``P = T(r) + sigma2 * inv(K)``.

    ``e_variant="largest"`` (default) makes E minimise the largest
    eigenvalue of the posterior covariance; ``"least"`` uses its least
    eigenvalue instead.  ``regularized=False`` drops ``sigma2 * inv(K)``,
    which gives the least-squares design.
    """

    N: int
    n: int
    C: float
    sigma2: float
    kernel: KernelSpec
    criterion: str = "D"
    regularized: bool = True
    e_variant: str = "largest"

    def __post_init__(self):
        if not self.N >= self.n >= 1:
            raise BadDimension(f"need N >= n >= 1, got N={self.N}, n={self.n}")
        if not self.C > 0:
            raise ValueError(f"power C must be > 0, got {self.C}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.e_variant not in ("largest", "least"):
            raise ValueError(f"unknown e_variant {self.e_variant!r}")
        if self.kernel.n != self.n:
            raise BadDimension(f"kernel dimension {self.kernel.n} != n={self.n}")

    def regularization(self):
        """``sigma2 * inv(K)``, or zeros when regularization is off."""
        if not self.regularized:
            return np.zeros((self.n, self.n))
        K = realize_kernel(self.kernel)
        if self.n <= 64:
            return self.sigma2 * np.linalg.inv(K)
        try:
            c = scipy.linalg.cho_factor(K)
        except np.linalg.LinAlgError as exc:
            raise BadHyperparameter("Cholesky of the kernel failed") from exc
        return self.sigma2 * scipy.linalg.cho_solve(c, np.eye(self.n))


def information_matrix(r, p, reg=None):
    """``P = T(r) + sigma2 * inv(K)``."""
    r = np.asarray(r, dtype=float)
    if r.shape != (p.n,):
        raise BadDimension(f"r must have length n={p.n}")
    if reg is None:
        reg = p.regularization()
    return toeplitz_from_autocov(r) + reg


def toeplitz_adjoint(M):
    """``[tr(M T_0), ..., tr(M T_{n-1})]`` with ``T_i`` ones on the +-i diagonals."""
    n = M.shape[0]
    out = np.array([np.trace(M, offset=i) + np.trace(M, offset=-i) for i in range(n)])
    out[0] /= 2
    return out


class _Evaluator:
    """Objective and gradient in ``r`` for a fixed problem (caches ``sigma2 inv(K)``)."""

    def __init__(self, p):
        self.p = p
        self.reg = p.regularization()

    def _factor(self, r):
        P = scipy.linalg.toeplitz(r) + self.reg
        try:
            return P, scipy.linalg.cho_factor(P, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NotPSD("information matrix is not positive definite") from exc

    def value_and_grad(self, r):
        p = self.p
        s2 = p.sigma2
        P, c = self._factor(r)
        if p.criterion == "D":
            logdet = 2 * np.sum(np.log(np.diag(c[0])))
            Pinv = scipy.linalg.cho_solve(c, np.eye(p.n))
            return p.n * np.log(s2) - logdet, -toeplitz_adjoint(Pinv)
        if p.criterion == "A":
            Pinv = scipy.linalg.cho_solve(c, np.eye(p.n))
            return s2 * np.trace(Pinv), -s2 * toeplitz_adjoint(Pinv @ Pinv)
        lam, V = np.linalg.eigh(P)
        if p.e_variant == "largest":
            lam_e, v = lam[0], V[:, 0]
        else:
            lam_e, v = lam[-1], V[:, -1]
        return s2 / lam_e, -s2 * toeplitz_adjoint(np.outer(v, v)) / lam_e**2

    def value(self, r):
        return self.value_and_grad(r)[0]


def objective_value(r, p):
    """Design criterion at ``r``: D ``logdet(s2 inv P)``, A ``s2 tr(inv P)``,
    E ``s2 / lambda_min(P)`` (or ``s2 / lambda_max(P)`` for the least variant)."""
    return _Evaluator(p).value(np.asarray(r, dtype=float))


def objective_gradient(r, p):
    """Gradient (a subgradient for E) of ``objective_value`` with respect to ``r``."""
    return _Evaluator(p).value_and_grad(np.asarray(r, dtype=float))[1]


def feasible_vertices(N, n, C):
    """Vertices ``C cos(2 pi k i / N)``, ``k = 0..N//2``, of the autocovariance polytope."""
    if not 1 <= n <= N:
        raise BadDimension(f"need 1 <= n <= N, got n={n}, N={N}")
    A = reduced_matrix(N, n)
    return [C * A[:, k] for k in range(half_length(N))]


def random_feasible(N, n, C, seed=0):
    """Autocovariance of an input drawn uniformly from the power sphere."""
    if not 1 <= n <= N:
        raise BadDimension(f"need 1 <= n <= N, got n={n}, N={N}")
    u = rngmod.stream(seed, rngmod.BASELINE).standard_normal(N)
    u *= np.sqrt(C) / np.linalg.norm(u)
    return quadratic_map(u, n)


@dataclass
class SolverOptions:
    max_iter: int = 5000
    tol: float = 1e-6
    line_search: bool = True
    away_steps: bool = True
    seed: int = 0
    step_scale: float = 0.1  # E criterion: step a/sqrt(t) is step_scale * C / sqrt(t)
    plateau_window: int = 100
    plateau_rtol: float = 1e-9


@dataclass
class DesignSolution:
    r_star: np.ndarray
    w_star: np.ndarray
    objective: float
    certificate: float
    iterations: int
    history: list = field(default_factory=list, repr=False)


def _line_search(ev, r, dr, g_max, iters=100):
    """Exact step on ``[0, g_max]`` for the D/A objective along ``r + g dr``.

    With ``P = L L^T`` and ``L^-1 T(dr) L^-T = Q diag(mu) Q^T`` the line
    function is a sum of scalar terms in ``1 + g mu``, so its derivative is
    cheap to bisect.
    """
    p = ev.p
    P, c = ev._factor(r)
    Linv = scipy.linalg.solve_triangular(c[0], np.eye(p.n), lower=True)
    mu, Q = np.linalg.eigh(Linv @ scipy.linalg.toeplitz(dr) @ Linv.T)
    if p.criterion == "D":
        def slope(g):
            return -np.sum(mu / (1 + g * mu))
    else:
        weights = np.sum((Linv.T @ Q) ** 2, axis=0)

        def slope(g):
            return -p.sigma2 * np.sum(weights * mu / (1 + g * mu) ** 2)

    # stay strictly inside the region where P + g T(dr) is positive definite
    if mu.min() < 0:
        g_max = min(g_max, (1 - 1e-12) * (-1 / mu.min()))
    if slope(g_max) <= 0:
        return g_max
    lo, hi = 0.0, g_max
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * g_max:
            break
    return lo


def _frank_wolfe(p, opts, A, ev):
    H = A.shape[1]
    C = p.C
    x = np.full(H, C / H)
    r = A @ x
    J, g = ev.value_and_grad(r)
    history = [J]
    gap = np.inf
    for t in range(opts.max_iter):
        gx = A.T @ g
        s = int(np.argmin(gx))
        gap = gx @ x - C * gx[s]
        if gap <= opts.tol * (1 + abs(J)):
            return DesignSolution(r, half_to_full(x, p.N), J, max(gap, 0.0), t, history)
        d = -x.copy()
        d[s] += C
        g_max = 1.0
        if opts.away_steps and opts.line_search:
            support = np.flatnonzero(x > 0)
            v = support[np.argmax(gx[support])]
            away_gap = C * gx[v] - gx @ x
            if away_gap > gap and x[v] < C:
                d = x.copy()
                d[v] -= C
                g_max = x[v] / (C - x[v])
        dr = A @ d
        step = _line_search(ev, r, dr, g_max) if opts.line_search else 2.0 / (t + 2)
        x = np.maximum(x + step * d, 0.0)
        if opts.line_search and step == g_max and g_max != 1.0:
            x[v] = 0.0  # drop step: vertex leaves the active set exactly
        r = A @ x
        J, g = ev.value_and_grad(r)
        history.append(J)
    sol = DesignSolution(r, half_to_full(x, p.N), J, max(gap, 0.0), opts.max_iter, history)
    raise NotConverged(
        f"Frank-Wolfe gap {gap:.3e} above {opts.tol * (1 + abs(J)):.3e} "
        f"after {opts.max_iter} iterations",
        sol,
    )


def project_simplex(y, total):
    """Euclidean projection onto ``{x >= 0, sum(x) == total}``."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - total
    rho = np.nonzero(u * np.arange(1, y.size + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(y - theta, 0.0)


def _subgradient(p, opts, A, ev):
    H = A.shape[1]
    C = p.C
    x = np.full(H, C / H)
    r = A @ x
    J, g = ev.value_and_grad(r)
    best = (J, x.copy(), g)
    history = [J]
    for t in range(1, opts.max_iter + 1):
        gx = A.T @ g
        norm = np.linalg.norm(gx)
        if norm == 0:
            break
        x = project_simplex(x - opts.step_scale * C / np.sqrt(t) * gx / norm, C)
        r = A @ x
        J, g = ev.value_and_grad(r)
        if J < best[0]:
            best = (J, x.copy(), g)
        history.append(best[0])
        w = opts.plateau_window
        if t >= w and abs(history[-w - 1] - best[0]) <= opts.plateau_rtol * abs(best[0]):
            break
    J, x, g = best
    gx = A.T @ g
    cert = float(np.linalg.norm(project_simplex(x - gx, C) - x))
    sol = DesignSolution(A @ x, half_to_full(x, p.N), J, cert, t, history)
    if t >= opts.max_iter:
        raise NotConverged(f"subgradient method did not plateau in {opts.max_iter} iterations", sol)
    return sol


def solve_design(p, opts=None):
    """Optimal autocovariance for ``p``.

    D and A: Frank-Wolfe with away steps and exact line search (or plain
    2/(t+2) steps when ``line_search`` is off); the certificate is the
    Frank-Wolfe duality gap.  E: projected subgradient with ``a/sqrt(t)``
    steps and best-iterate tracking; the certificate is the length of the
    projected subgradient step at the best iterate.  The "least" E variant
    is not convex in ``r``, so the subgradient result is only a local answer.

    Raises
    ------
    NotConverged
        Carries the best iterate on ``.solution``.
    """
    opts = opts or SolverOptions()
    A = reduced_matrix(p.N, p.n)
    ev = _Evaluator(p)
    if p.n == 1:
        # r = [C] is the only feasible autocovariance
        x = np.zeros(A.shape[1])
        x[0] = p.C
        return DesignSolution(A @ x, half_to_full(x, p.N), ev.value(A @ x), 0.0, 0, [])
    if p.criterion in ("D", "A"):
        return _frank_wolfe(p, opts, A, ev)
    return _subgradient(p, opts, A, ev)
