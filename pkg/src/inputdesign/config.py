"""Run configuration: a YAML (or JSON) mapping plus command-line overrides.

Keys::

    N: 120                # period length
    n: 50                 # FIR order
    C: 120.0              # input power
    sigma2: 0.5           # noise variance
    kernel:
      family: TC          # TC | DC | custom
      scale: 1.0
      decay: 0.85
      correlation: 0.0    # DC only
      matrix: [[...]]     # custom only
    criterion: D          # D | A | E
    e_variant: largest    # E only: largest | least
    regularized: true
    seed: 0
    solver:
      max_iter: 5000
      tol: 1.0e-6
      line_search: true
      away_steps: true
      step_scale: 0.1     # E only
      plateau_window: 100 # E only
      plateau_rtol: 1.0e-9
"""

from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from .design import DesignProblem, KernelSpec, SolverOptions
from .errors import InputDesignError

DEFAULT_CONFIG = {
    "N": 120,
    "n": 50,
    "C": 120.0,
    "sigma2": 0.5,
    "kernel": {"family": "TC", "scale": 1.0, "decay": 0.85},
    "criterion": "D",
    "seed": 0,
}


class ConfigError(InputDesignError, ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"config field {field!r}: {message}")
        self.field = field


def _get(d, key, conv, default=None, required=True, prefix=""):
    name = prefix + key
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(name, "missing")
        return default
    try:
        return conv(d[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"cannot interpret {d[key]!r}") from exc


def _bool(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.lower() in ("true", "false", "yes", "no", "1", "0"):
        return v.lower() in ("true", "yes", "1")
    raise ValueError(v)


@dataclass
class ProblemConfig:
    problem: DesignProblem
    solver: SolverOptions = field(default_factory=SolverOptions)
    seed: int = 0

    def to_dict(self):
        """Plain mapping that ``from_dict`` turns back into an equal config."""
        k = self.problem.kernel
        kernel = {"family": k.family}
        if k.family.upper() == "CUSTOM":
            kernel["matrix"] = np.asarray(k.matrix).tolist()
        else:
            kernel.update(scale=k.scale, decay=k.decay)
            if k.family.upper() == "DC":
                kernel["correlation"] = k.correlation
        p = self.problem
        return {
            "N": p.N,
            "n": p.n,
            "C": p.C,
            "sigma2": p.sigma2,
            "kernel": kernel,
            "criterion": p.criterion,
            "e_variant": p.e_variant,
            "regularized": p.regularized,
            "seed": self.seed,
            "solver": {k: v for k, v in asdict(self.solver).items() if k != "seed"},
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("<root>", "configuration must be a mapping")
        N = _get(d, "N", int)
        n = _get(d, "n", int)
        C = _get(d, "C", float)
        sigma2 = _get(d, "sigma2", float)
        kd = d.get("kernel")
        if not isinstance(kd, dict):
            raise ConfigError("kernel", "missing or not a mapping")
        family = _get(kd, "family", str, prefix="kernel.")
        if family.upper() not in ("TC", "DC", "CUSTOM"):
            raise ConfigError("kernel.family", f"unknown family {family!r}")
        if family.upper() == "CUSTOM":
            matrix = _get(kd, "matrix", lambda m: np.asarray(m, dtype=float), prefix="kernel.")
            kernel = KernelSpec(family, n, matrix=matrix)
        else:
            kernel = KernelSpec(
                family,
                n,
                scale=_get(kd, "scale", float, 1.0, False, "kernel."),
                decay=_get(kd, "decay", float, 0.85, False, "kernel."),
                correlation=_get(kd, "correlation", float, 0.0, False, "kernel."),
            )
        criterion = _get(d, "criterion", lambda s: str(s).upper(), "D", False)
        seed = _get(d, "seed", int, 0, False)
        sd = d.get("solver") or {}
        if not isinstance(sd, dict):
            raise ConfigError("solver", "must be a mapping")
        options = {}
        for f in fields(SolverOptions):
            if f.name == "seed":
                continue
            default = getattr(SolverOptions(), f.name)
            conv = _bool if isinstance(default, bool) else type(default)
            options[f.name] = _get(sd, f.name, conv, default, False, "solver.")
        unknown = set(sd) - {f.name for f in fields(SolverOptions)}
        if unknown:
            raise ConfigError("solver." + sorted(unknown)[0], "unknown option")
        solver = SolverOptions(seed=seed, **options)
        try:
            problem = DesignProblem(
                N=N,
                n=n,
                C=C,
                sigma2=sigma2,
                kernel=kernel,
                criterion=criterion,
                regularized=_get(d, "regularized", _bool, True, False),
                e_variant=_get(d, "e_variant", str, "largest", False),
            )
        except ValueError as exc:
            raise ConfigError("<problem>", str(exc)) from exc
        return cls(problem, solver, seed)


def load_config(path):
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError("<file>", f"not valid YAML/JSON: {exc}") from exc
    return ProblemConfig.from_dict(data)
