from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..scheme import Grid, SolverConfig

PROBLEM_NAMES = ("example1", "example2", "custom-constant")
DEFAULTS_PATH = Path(__file__).parent / "runs.yaml"

# =============================================================================
#  Run Configuration
# =============================================================================


class RunConfig(BaseModel):
    """One validated run: problem, orders, mesh and solver settings."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    problem: Literal["example1", "example2", "custom-constant"] = "example1"
    alpha: float
    beta: float
    N: int = 32
    M: int = 32
    T: float = 1.0
    a: float = 0.0
    b: float = 1.0
    solver: Literal["pcgs", "dense", "auto"] = "auto"
    tol: float = 1e-12
    maxit: int = 1000
    output: Path = Path("results")
    gamma: Optional[float] = None
    dplus: Optional[float] = None
    dminus: Optional[float] = None

    @field_validator("alpha")
    @classmethod
    def _alpha_range(cls, v):
        if not 0.0 < v <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {v}")
        return v

    @field_validator("beta")
    @classmethod
    def _beta_range(cls, v):
        if not 1.0 < v <= 2.0:
            raise ValueError(f"beta must lie in (1, 2], got {v}")
        return v

    @field_validator("N")
    @classmethod
    def _n_min(cls, v):
        if v < 5:
            raise ValueError(f"N must be >= 5, got {v}")
        return v

    @field_validator("M", "maxit")
    @classmethod
    def _positive_count(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {v}")
        return v

    @field_validator("T", "tol")
    @classmethod
    def _positive_real(cls, v, info):
        if not v > 0:
            raise ValueError(f"{info.field_name} must be > 0, got {v}")
        return v

    @field_validator("dplus", "dminus")
    @classmethod
    def _non_negative(cls, v, info):
        if v is not None and v < 0:
            raise ValueError(f"{info.field_name} must be >= 0, got {v}")
        return v

    @model_validator(mode="after")
    def _interval_and_constants(self):
        if not self.a < self.b:
            raise ValueError(f"interval needs a < b, got a={self.a}, b={self.b}")
        if self.problem == "custom-constant":
            missing = [k for k in ("gamma", "dplus", "dminus") if getattr(self, k) is None]
            if missing:
                raise ValueError(f"custom-constant needs {', '.join(missing)}")
        return self

    def grid(self) -> Grid:
        return Grid(N=self.N, M=self.M, T=self.T, a=self.a, b=self.b)

    def solver_method(self) -> str:
        """Linear-solver method handed to the drivers; auto means pcgs."""
        return "dense" if self.solver == "dense" else "pcgs"

    def solver_config(self, progress: bool = False) -> SolverConfig:
        return SolverConfig(method=self.solver_method(), tol=self.tol, maxit=self.maxit, progress=progress)


# =============================================================================
#  Configuration Loading
# =============================================================================


def load_defaults(problem: str) -> Dict[str, Any]:
    """Merge the `common` block of runs.yaml with the named problem entry."""
    if not DEFAULTS_PATH.exists():
        raise FileNotFoundError(f"defaults file not found: {DEFAULTS_PATH}")

    with open(DEFAULTS_PATH, "r", encoding="utf-8") as f:
        full_config = yaml.safe_load(f)

    if problem not in full_config["problems"]:
        raise ConfigError("problem", f"unknown problem {problem!r}; available: {list(full_config['problems'].keys())}")

    merged_config = dict(full_config["common"])
    merged_config.update(full_config["problems"][problem])
    merged_config.pop("description", None)
    merged_config["problem"] = problem
    return merged_config


def load_user_file(path: Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError("config", f"file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a key-value mapping")
    return data


def _as_config_error(err: ValidationError) -> ConfigError:
    first = err.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "config"
    message = first["msg"].removeprefix("Value error, ")
    if first["type"] == "extra_forbidden":
        message = "unknown key"
    return ConfigError(key, message)


def parse_config(config_file: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig from runs.yaml defaults, an optional user file and flags.

    Precedence: common < problem entry < user file < overrides. Overrides
    whose value is None are ignored.

    Raises:
        ConfigError: unknown problem or key, or a value out of range
    """
    user = load_user_file(config_file) if config_file else {}
    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    problem = flags.get("problem", user.get("problem", "example1"))

    values = load_defaults(str(problem))
    values.update(user)
    values.update(flags)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise _as_config_error(e) from e
