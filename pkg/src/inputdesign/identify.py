"""FIR simulation with periodic inputs, LS/RLS estimation, and design evaluation."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import rng as rngmod
from .design import objective_value, realize_kernel
from .errors import BadDimension, BadHyperparameter, IllConditioned
from .inversion import giie
from .spectral import quadratic_map

ILL_CONDITIONED_RATIO = 1e-10


@dataclass(frozen=True)
class FirSystem:
    impulse_response: np.ndarray
    noise_variance: float

    def __post_init__(self):
        theta = np.asarray(self.impulse_response, dtype=float)
        if theta.ndim != 1 or theta.size < 1:
            raise BadDimension("impulse response must be a non-empty vector")
        if not self.noise_variance > 0:
            raise ValueError("noise variance must be > 0")
        object.__setattr__(self, "impulse_response", theta)

    @property
    def n(self):
        return self.impulse_response.size


def regressor(u, n):
    """Circulant regressor: row t is ``[u_t, u_{t-1}, ..., u_{t-n+1}]`` (indices mod N)."""
    u = np.asarray(u, dtype=float)
    N = u.size
    if not 1 <= n <= N:
        raise BadDimension(f"need 1 <= n <= N, got n={n}, N={N}")
    idx = (np.arange(N)[:, None] - np.arange(n)[None, :]) % N
    return u[idx]


def simulate(system, u, seed=0, noiseless=False, noise="gaussian"):
    """One period of output ``y = Phi theta + e`` with white noise of variance sigma^2."""
    Phi = regressor(u, system.n)
    y = Phi @ system.impulse_response
    if noiseless:
        return y
    g = rngmod.stream(seed, rngmod.NOISE)
    sd = np.sqrt(system.noise_variance)
    if noise == "gaussian":
        e = g.normal(0.0, sd, y.size)
    elif noise == "uniform":
        half_width = sd * np.sqrt(3.0)
        e = g.uniform(-half_width, half_width, y.size)
    else:
        raise ValueError(f"unknown noise model {noise!r}")
    return y + e


def ls_estimate(Phi, y):
    """Least-squares impulse response; refuses rank-deficient excitation."""
    Phi = np.asarray(Phi, dtype=float)
    eig = np.linalg.eigvalsh(Phi.T @ Phi)
    if eig[-1] <= 0 or eig[0] <= ILL_CONDITIONED_RATIO * eig[-1]:
        raise IllConditioned("input does not excite all impulse-response lags")
    return np.linalg.lstsq(Phi, np.asarray(y, dtype=float), rcond=None)[0]


@dataclass(frozen=True)
class RlsResult:
    theta: np.ndarray
    covariance: np.ndarray  # posterior covariance sigma^2 inv(P)


def rls_estimate(Phi, y, K, sigma2):
    """Regularized LS ``inv(Phi^T Phi + sigma2 inv(K)) Phi^T y`` and its posterior covariance."""
    Phi = np.asarray(Phi, dtype=float)
    K = np.asarray(K, dtype=float)
    try:
        cK = scipy.linalg.cho_factor(K)
    except np.linalg.LinAlgError as exc:
        raise BadHyperparameter("kernel matrix is not positive definite") from exc
    P = Phi.T @ Phi + sigma2 * scipy.linalg.cho_solve(cK, np.eye(K.shape[0]))
    cP = scipy.linalg.cho_factor(P)
    theta = scipy.linalg.cho_solve(cP, Phi.T @ np.asarray(y, dtype=float))
    cov = sigma2 * scipy.linalg.cho_solve(cP, np.eye(P.shape[0]))
    return RlsResult(theta, cov)


def draw_impulse_response(K, seed):
    """Sample ``theta ~ N(0, K)`` from the baseline stream of ``seed``."""
    L = np.linalg.cholesky(K)
    return L @ rngmod.stream(seed, rngmod.BASELINE).standard_normal(K.shape[0])


@dataclass
class EvaluationReport:
    designed_error: list = field(default_factory=list)
    baseline_error: list = field(default_factory=list)
    designed_objective: float = float("nan")
    baseline_objective: list = field(default_factory=list)

    @property
    def trials(self):
        return len(self.designed_error)

    def mean_errors(self):
        if not self.trials:
            return float("nan"), float("nan")
        return float(np.mean(self.designed_error)), float(np.mean(self.baseline_error))


def evaluate_design(problem, solution, system, trials, seed=0, gamma=0.5, noiseless=False):
    """Monte-Carlo RLS error with designed inputs versus random-input baselines.

    Trial i uses seed ``seed + i``: the designed arm draws an input from the
    inverse image of ``solution.r_star``; the baseline arm uses a random
    input of the same power.  Both arms share the same noise stream.
    ``noiseless`` means sigma^2 -> 0 in both the data and the estimator.
    """
    report = EvaluationReport(designed_objective=float(solution.objective))
    if trials <= 0:
        return report
    if system.n != problem.n:
        raise BadDimension("system order does not match the design problem")
    K = realize_kernel(problem.kernel)
    theta = system.impulse_response
    sigma2_est = 0.0 if noiseless else system.noise_variance
    for i in range(trials):
        s = seed + i
        u_design = giie(solution.r_star, problem.N, gamma, seed=s)
        g = rngmod.stream(s, rngmod.BASELINE)
        u_base = g.standard_normal(problem.N)
        u_base *= np.sqrt(problem.C) / np.linalg.norm(u_base)
        r_base = quadratic_map(u_base, problem.n)
        for u, errors in ((u_design, report.designed_error), (u_base, report.baseline_error)):
            y = simulate(system, u, seed=s, noiseless=noiseless)
            est = rls_estimate(regressor(u, problem.n), y, K, sigma2_est)
            errors.append(float(np.sum((est.theta - theta) ** 2)))
        report.baseline_objective.append(float(objective_value(r_base, problem)))
    return report

