"""Regression-function abstraction and the built-in nonlinear models.

Each model bundles a mean function ``f(x, beta)``, its analytic parameter
gradient, and a domain check that flags singular parameter points.  Singular
points are rejected with an explicit error rather than patched with analytic
limits, so optimizers treat them as infeasible steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import SingularParameterError

__all__ = [
    "RegressionModel",
    "make_two_compartment",
    "make_chwirut_rational",
    "make_linear",
    "get_model",
    "check_gradient",
    "finite_difference_gradient",
]


@dataclass(frozen=True)
class RegressionModel:
    """A regression function with analytic derivative and metadata.

    Attributes
    ----------
    name : str
        Identifier used by the CLI and config files.
    d : int
        Parameter dimension.
    p : int
        Covariate dimension.
    f : callable
        Scalar mean function ``f(x, beta) -> float`` for a single covariate
        vector ``x`` of length ``p``.
    grad : callable
        Analytic gradient ``grad(x, beta) -> (d,) array`` of ``f`` in beta.
    domain_check : callable
        ``domain_check(beta, x=None) -> bool``; True when ``beta`` is a
        regular point (for the whole evaluated sample ``x`` when given).
    predict, jacobian : callable, optional
        Vectorized versions over an ``(n, p)`` design matrix.  Filled with
        row loops over ``f``/``grad`` when not supplied.
    """

    name: str
    d: int
    p: int
    f: Callable
    grad: Callable
    domain_check: Callable
    predict: Callable = field(default=None, repr=False)
    jacobian: Callable = field(default=None, repr=False)

    def __post_init__(self):
        if self.d < 1 or self.p < 1:
            raise ValueError("model dimensions must be positive")
        if self.predict is None:
            object.__setattr__(
                self, "predict",
                lambda X, beta: np.array([self.f(x, beta) for x in np.atleast_2d(X)]),
            )
        if self.jacobian is None:
            object.__setattr__(
                self, "jacobian",
                lambda X, beta: np.array([self.grad(x, beta) for x in np.atleast_2d(X)]),
            )

    def require_domain(self, beta, x=None):
        """Raise SingularParameterError unless ``beta`` is a regular point."""
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.d,):
            raise ValueError(f"expected beta of length {self.d}, got shape {beta.shape}")
        if not np.all(np.isfinite(beta)) or not self.domain_check(beta, x):
            raise SingularParameterError(
                f"model '{self.name}': singular or invalid parameter {beta.tolist()}"
            )
        return beta


def _as_design(X, p):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if p == 1 else X[None, :]
    return X


def make_two_compartment() -> RegressionModel:
    """Two-compartment pharmacokinetic curve, d=2, p=1.

    f(x; b) = b1/(b1-b2) * (exp(-b2 x) - exp(-b1 x)).  Points with
    |b1-b2| < 1e-10 are singular and rejected.
    """

    def domain_check(beta, x=None):
        return abs(beta[0] - beta[1]) >= 1e-10

    def predict(X, beta):
        X = _as_design(X, 1)
        b1, b2 = beta
        if abs(b1 - b2) < 1e-10:
            raise SingularParameterError("two_compartment: b1 == b2 is singular")
        x = X[:, 0]
        return b1 / (b1 - b2) * (np.exp(-b2 * x) - np.exp(-b1 * x))

    def jacobian(X, beta):
        X = _as_design(X, 1)
        b1, b2 = beta
        if abs(b1 - b2) < 1e-10:
            raise SingularParameterError("two_compartment: b1 == b2 is singular")
        x = X[:, 0]
        diff = b1 - b2
        e1 = np.exp(-b1 * x)
        e2 = np.exp(-b2 * x)
        s = e2 - e1
        c = b1 / diff
        g1 = -b2 / diff**2 * s + c * x * e1
        g2 = b1 / diff**2 * s - c * x * e2
        return np.column_stack([g1, g2])

    return RegressionModel(
        name="two_compartment",
        d=2,
        p=1,
        f=lambda x, beta: float(predict(np.atleast_1d(x), beta)[0]),
        grad=lambda x, beta: jacobian(np.atleast_1d(x), beta)[0],
        domain_check=domain_check,
        predict=predict,
        jacobian=jacobian,
    )


def make_chwirut_rational() -> RegressionModel:
    """Exponential-over-linear ultrasonic response curve, d=3, p=1.

    f(x; b) = exp(-b1 x) / (b2 + b3 x).  The denominator must stay above
    1e-12 over the evaluated sample.
    """

    def domain_check(beta, x=None):
        if x is None:
            return True
        x = _as_design(x, 1)[:, 0]
        return bool(np.all(beta[1] + beta[2] * x > 1e-12))

    def predict(X, beta):
        X = _as_design(X, 1)
        b1, b2, b3 = beta
        x = X[:, 0]
        q = b2 + b3 * x
        if np.any(q <= 1e-12):
            raise SingularParameterError("chwirut: denominator b2 + b3*x vanishes")
        return np.exp(-b1 * x) / q

    def jacobian(X, beta):
        X = _as_design(X, 1)
        b1, b2, b3 = beta
        x = X[:, 0]
        q = b2 + b3 * x
        if np.any(q <= 1e-12):
            raise SingularParameterError("chwirut: denominator b2 + b3*x vanishes")
        e = np.exp(-b1 * x)
        return np.column_stack([-x * e / q, -e / q**2, -x * e / q**2])

    return RegressionModel(
        name="chwirut",
        d=3,
        p=1,
        f=lambda x, beta: float(predict(np.atleast_1d(x), beta)[0]),
        grad=lambda x, beta: jacobian(np.atleast_1d(x), beta)[0],
        domain_check=domain_check,
        predict=predict,
        jacobian=jacobian,
    )


def make_linear(p: int) -> RegressionModel:
    """Linear model f(x; beta) = x'beta with d = p covariates."""
    if p < 1:
        raise ValueError("p must be >= 1")

    def predict(X, beta):
        return _as_design(X, p) @ beta

    def jacobian(X, beta):
        return _as_design(X, p).copy()

    return RegressionModel(
        name="linear",
        d=p,
        p=p,
        f=lambda x, beta: float(np.dot(np.atleast_1d(np.asarray(x, dtype=float)), beta)),
        grad=lambda x, beta: np.atleast_1d(np.asarray(x, dtype=float)).astype(float),
        domain_check=lambda beta, x=None: True,
        predict=predict,
        jacobian=jacobian,
    )


_REGISTRY = {
    "two_compartment": lambda p=1: make_two_compartment(),
    "chwirut": lambda p=1: make_chwirut_rational(),
    "linear": lambda p=1: make_linear(p),
}


def get_model(name: str, p: int = 1) -> RegressionModel:
    """Look up a built-in model by name ('two_compartment', 'chwirut', 'linear')."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown model '{name}'; available: {sorted(_REGISTRY)}"
        ) from None
    return factory(p=p)


def finite_difference_gradient(model: RegressionModel, x, beta) -> np.ndarray:
    """Central-difference gradient with per-component step 1e-6 * (1 + |beta_k|)."""
    beta = np.asarray(beta, dtype=float)
    out = np.empty(model.d)
    for k in range(model.d):
        h = 1e-6 * (1.0 + abs(beta[k]))
        bp = beta.copy()
        bm = beta.copy()
        bp[k] += h
        bm[k] -= h
        out[k] = (model.f(x, bp) - model.f(x, bm)) / (2.0 * h)
    return out


def check_gradient(model: RegressionModel, x, beta, tol: float = 1e-6) -> bool:
    """True when the analytic gradient matches central differences.

    Deviation is measured per component as |a - fd| / (1 + max(|a|, |fd|)),
    which behaves relatively for large components and absolutely near zero.
    Raises SingularParameterError at singular points.
    """
    beta = model.require_domain(np.asarray(beta, dtype=float), np.atleast_1d(x))
    analytic = np.asarray(model.grad(x, beta), dtype=float)
    fd = finite_difference_gradient(model, x, beta)
    dev = np.abs(analytic - fd) / (1.0 + np.maximum(np.abs(analytic), np.abs(fd)))
    return bool(np.max(dev) <= tol)
