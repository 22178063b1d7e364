"""Seeded generation of covariates, errors, and MAR missingness.

Missingness is generated from the covariates only (never from the
response), so every simulated dataset is missing-at-random by
construction.  Each replicate owns its own deterministic stream derived
from a (master_seed, stream_id) pair, which makes parallel runs
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SingularParameterError
from .models import RegressionModel

__all__ = [
    "SeedSpec",
    "ErrorDist",
    "MissingnessRule",
    "CovariateSpec",
    "ObservedDataset",
    "pi_case_a",
    "sample_error",
    "generate_dataset",
]

_FAMILIES = ("normal", "laplace", "cauchy")


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic stream identity: same pair, same byte stream."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("seeds must be non-negative integers")

    def rng(self, *extra: int) -> np.random.Generator:
        return np.random.default_rng([self.master_seed, self.stream_id, *extra])

    def with_stream(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)


@dataclass(frozen=True)
class ErrorDist:
    """Error distribution: normal, laplace, or cauchy.

    ``sigma`` is the standard deviation for the normal family and the
    scale parameter for laplace and cauchy, matching the usual
    scale-parameterized generators.
    """

    family: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"family must be one of {_FAMILIES}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def density_at_zero(self) -> float:
        if self.family == "normal":
            return 1.0 / (self.sigma * np.sqrt(2.0 * np.pi))
        if self.family == "laplace":
            return 1.0 / (2.0 * self.sigma)
        return 1.0 / (np.pi * self.sigma)

    @property
    def has_finite_variance(self) -> bool:
        return self.family != "cauchy"

    @property
    def variance(self) -> Optional[float]:
        if self.family == "normal":
            return self.sigma**2
        if self.family == "laplace":
            return 2.0 * self.sigma**2
        return None

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.family == "normal":
            return self.sigma * rng.standard_normal(count)
        if self.family == "laplace":
            return rng.laplace(0.0, self.sigma, count)
        return self.sigma * rng.standard_cauchy(count)


def pi_case_a(x):
    """Selection probability 0.8 + 0.2|x-1| when |x-1| <= 1, else 0.95."""
    x = np.asarray(x, dtype=float)
    dist = np.abs(x - 1.0)
    out = np.where(dist <= 1.0, 0.8 + 0.2 * dist, 0.95)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MissingnessRule:
    """Selection probability pi(x) = P[response observed | X = x]."""

    kind: str
    pi: Callable = field(repr=False)

    @classmethod
    def case_a(cls) -> "MissingnessRule":
        return cls(kind="case_a", pi=pi_case_a)

    @classmethod
    def case_b(cls, prob: float = 0.8) -> "MissingnessRule":
        if not 0.0 < prob <= 1.0:
            raise ValueError("probability must lie in (0, 1]")
        return cls(kind="case_b", pi=lambda x: prob)

    @classmethod
    def custom(cls, fn: Callable) -> "MissingnessRule":
        return cls(kind="custom", pi=fn)

    def pi_values(self, X: np.ndarray) -> np.ndarray:
        """Evaluate pi at each row of the design matrix (covariates only)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "case_a":
            values = pi_case_a(X[:, 0])
        elif self.kind == "case_b":
            values = np.full(X.shape[0], float(self.pi(0.0)))
        else:
            rows = X[:, 0] if X.shape[1] == 1 else list(X)
            values = np.array([float(self.pi(row)) for row in rows])
        if np.any(values <= 0.0) or np.any(values > 1.0):
            raise ValueError("pi(x) must lie in (0, 1] for every x")
        return values


@dataclass(frozen=True)
class CovariateSpec:
    """Covariate distribution; only iid normal(mean, sd) is supported."""

    mean: float = 1.0
    sd: float = 1.0

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("sd must be positive")

    def sample(self, rng: np.random.Generator, n: int, p: int) -> np.ndarray:
        return rng.normal(self.mean, self.sd, size=(n, p))


@dataclass
class ObservedDataset:
    """Sample of (x, y-or-missing, delta) rows; delta=0 iff y is absent.

    Missing responses are stored as NaN and always accompanied by delta=0.
    """

    x: np.ndarray
    y: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.y = np.asarray(self.y, dtype=float)
        self.delta = np.asarray(self.delta, dtype=np.int8)
        n = self.x.shape[0]
        if n < 1:
            raise ValueError("dataset needs at least one row")
        if self.y.shape != (n,) or self.delta.shape != (n,):
            raise ValueError("x, y, delta must have matching length")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("covariates must be finite")
        if not np.all((self.delta == 0) | (self.delta == 1)):
            raise ValueError("delta entries must be 0 or 1")
        miss = np.isnan(self.y)
        if np.any(miss != (self.delta == 0)):
            raise ValueError("delta=0 must coincide exactly with missing y")
        if not np.all(np.isfinite(self.y[self.delta == 1])):
            raise ValueError("observed responses must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def complete_mask(self) -> np.ndarray:
        return self.delta == 1

    @property
    def n_complete(self) -> int:
        return int(self.delta.sum())


def sample_error(dist: ErrorDist, seed: SeedSpec, count: int) -> np.ndarray:
    """Draw ``count`` iid errors; deterministic given the seed."""
    if count < 0:
        raise ValueError("count must be >= 0")
    return dist.draw(seed.rng(), count)


def generate_dataset(
    model: RegressionModel,
    beta0,
    xdist: CovariateSpec,
    edist: ErrorDist,
    rule: MissingnessRule,
    n: int,
    seed: SeedSpec,
) -> ObservedDataset:
    """Simulate one MAR dataset: X ~ xdist, Y = f(X, beta0) + eps, delta | X.

    The draw order (covariates, errors, missingness uniforms) is fixed, so
    identical seeds give bitwise-identical datasets.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed.rng()
    X = xdist.sample(rng, n, model.p)
    beta0 = model.require_domain(np.asarray(beta0, dtype=float), X)
    f0 = model.predict(X, beta0)
    if not np.all(np.isfinite(f0)):
        raise SingularParameterError("regression function not finite at beta0")
    eps = edist.draw(rng, n)
    y = f0 + eps
    probs = rule.pi_values(X)
    delta = (rng.random(n) < probs).astype(np.int8)
    y = np.where(delta == 1, y, np.nan)
    return ObservedDataset(x=X, y=y, delta=delta)
