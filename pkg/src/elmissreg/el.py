"""Empirical-likelihood machinery: estimating functions, the Lagrange
inner problem, the EL ratio statistic and its quadratic-form approximation,
EL for a mean, and the maximum empirical likelihood estimator.

Given per-observation scores g_i(beta), the EL ratio statistic is

    l_n(beta) = 2 * sum_i log(1 + lam' g_i(beta)),

where the multiplier lam solves (1/n) sum_i g_i / (1 + lam' g_i) = 0.
That equation is the stationarity condition of the smooth concave dual

    L(lam) = sum_i log(1 + lam' g_i),

which is maximized here by damped Newton steps with a backtracking line
search that keeps every 1 + lam' g_i >= 1/n (equivalently every implied
weight p_i = 1/(n (1 + lam' g_i)) at most 1).  When the origin is not in
the convex hull of the scores no multiplier exists and the statistic is
+inf, which makes confidence-region membership a plain comparison against
a chi-squared quantile.

The quadratic approximation replaces l_n by n * gbar' Bn^{-1} gbar with
gbar the mean score and Bn = (1/n) sum_i g_i g_i'; the two agree to first
order at the true parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import SingularMatrixError, SingularParameterError
from .estimators import FitResult
from .models import RegressionModel
from .sampling import ObservedDataset

__all__ = [
    "ScoreMatrix",
    "ELEvaluation",
    "build_scores",
    "solve_lambda",
    "el_statistic",
    "el_statistic_approx",
    "el_mean_statistic",
    "mele_fit",
]

_KINDS = ("ls", "lad", "imputed", "mean")


@dataclass(frozen=True)
class ScoreMatrix:
    """n x d matrix of per-observation estimating-function values."""

    rows: np.ndarray
    kind: str

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError("scores must form a non-empty 2-d array")
        if not np.all(np.isfinite(rows)):
            raise ValueError("score entries must be finite")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class ELEvaluation:
    """Result of the Lagrange inner problem.

    ``statistic`` is the EL ratio value (+inf on hull violation); ``lam``
    and ``weights`` are filled only when the solver converged.
    """

    statistic: float
    lam: Optional[np.ndarray]
    weights: Optional[np.ndarray]
    status: str  # converged | hull_violation | singular
    iterations: int = 0

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def build_scores(data: ObservedDataset, model: RegressionModel, beta, kind: str) -> ScoreMatrix:
    """Per-observation scores at ``beta``.

    LS rows are delta * (y - f) * fdot, LAD rows delta * sign(y - f) * fdot;
    rows with delta = 0 are zero and do not move the multiplier.
    """
    kind = kind.lower()
    if kind not in ("ls", "lad"):
        raise ValueError("kind must be 'ls' or 'lad'")
    beta = model.require_domain(np.asarray(beta, dtype=float), data.x)
    fhat = model.predict(data.x, beta)
    J = model.jacobian(data.x, beta)
    resid = np.where(data.delta == 1, np.nan_to_num(data.y - fhat), 0.0)
    factor = resid if kind == "ls" else np.sign(resid)
    rows = (data.delta * factor)[:, None] * J
    return ScoreMatrix(rows=rows, kind=kind)


def _hull_contains_origin(G: np.ndarray) -> bool:
    """LP check: exists p with p_i >= t > 0, sum p = 1, G'p = 0."""
    n, d = G.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0  # maximize the weight floor t
    A_eq = np.zeros((d + 1, n + 1))
    A_eq[0, :n] = 1.0
    A_eq[1:, :n] = G.T
    b_eq = np.zeros(d + 1)
    b_eq[0] = 1.0
    A_ub = np.hstack([-np.eye(n), np.ones((n, 1))])  # t - p_i <= 0
    b_ub = np.zeros(n)
    bounds = [(0.0, 1.0)] * n + [(0.0, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs")
    return bool(res.success and -res.fun > 1e-12)


def solve_lambda(scores, max_iter: int = 100, tol: float = 1e-10) -> ELEvaluation:
    """Solve the Lagrange multiplier equation and evaluate the EL statistic.

    Damped Newton on the concave dual with backtracking that enforces
    1 + lam' g_i >= 1/n for every row.  Convergence is declared when the
    gradient (1/n) sum g_i / (1 + lam' g_i) has norm at most ``tol``.
    """
    G = scores.rows if isinstance(scores, ScoreMatrix) else np.asarray(scores, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    n, d = G.shape
    if n < 1:
        raise ValueError("need at least one score row")
    if not np.all(np.isfinite(G)):
        raise ValueError("score entries must be finite")

    gbar = G.mean(axis=0)
    if np.all(gbar == 0.0):
        lam = np.zeros(d)
        return ELEvaluation(0.0, lam, np.full(n, 1.0 / n), "converged", 0)

    if d == 1:
        g = G[:, 0]
        if not (g.min() < 0.0 < g.max()):
            return ELEvaluation(np.inf, None, None, "hull_violation", 0)

    lam = np.zeros(d)
    w = np.ones(n)
    logl = 0.0
    floor = 1.0 / n
    for it in range(1, max_iter + 1):
        grad = G.T @ (1.0 / w) / n
        if np.linalg.norm(grad) <= tol:
            weights = 1.0 / (n * w)
            return ELEvaluation(2.0 * float(np.sum(np.log(w))), lam, weights,
                                "converged", it - 1)
        Gw = G / w[:, None]
        H = Gw.T @ Gw / n
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            return ELEvaluation(np.nan, None, None, "singular", it - 1)
        if not np.all(np.isfinite(step)):
            return ELEvaluation(np.nan, None, None, "singular", it - 1)
        t = 1.0
        accepted = False
        for _ in range(60):
            lam_new = lam + t * step
            w_new = 1.0 + G @ lam_new
            if w_new.min() >= floor:
                logl_new = float(np.sum(np.log(w_new)))
                if logl_new >= logl:
                    lam, w, logl = lam_new, w_new, logl_new
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break

    if d > 1 and not _hull_contains_origin(G):
        return ELEvaluation(np.inf, None, None, "hull_violation", max_iter)
    grad = G.T @ (1.0 / w) / n
    if np.linalg.norm(grad) <= 1e-8:  # close enough for every downstream invariant
        weights = 1.0 / (n * w)
        return ELEvaluation(2.0 * float(np.sum(np.log(w))), lam, weights,
                            "converged", max_iter)
    return ELEvaluation(np.nan, None, None, "singular", max_iter)


def el_statistic(data: ObservedDataset, model: RegressionModel, beta, kind: str) -> ELEvaluation:
    """EL ratio statistic l_n(beta) for the LS or LAD estimating functions."""
    return solve_lambda(build_scores(data, model, beta, kind))


def el_statistic_approx(scores) -> float:
    """Quadratic-form approximation n * gbar' Bn^{-1} gbar of the EL statistic."""
    G = scores.rows if isinstance(scores, ScoreMatrix) else np.asarray(scores, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    s = G.sum(axis=0)
    if np.all(s == 0.0):
        return 0.0
    M = G.T @ G
    try:
        z = np.linalg.solve(M, s)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("score second-moment matrix is singular") from exc
    if not np.all(np.isfinite(z)) or np.linalg.cond(M) > 1e12:
        raise SingularMatrixError("score second-moment matrix is numerically singular")
    return float(s @ z)


def el_mean_statistic(values, theta0: float) -> ELEvaluation:
    """EL statistic for a mean: scores are values_i - theta0."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("need a 1-d sample of size >= 2")
    return solve_lambda(ScoreMatrix(rows=values - theta0, kind="mean"))


def mele_fit(data: ObservedDataset, model: RegressionModel, init, kind: str = "ls",
             max_evals: int = 1000) -> FitResult:
    """Minimize beta -> l_n(beta) by Nelder-Mead (the MELE point estimate).

    Infeasible points (singular parameters, hull violations, failed inner
    solves) evaluate to +inf so the simplex rejects them.
    """
    init = np.asarray(init, dtype=float)
    complete = int(data.delta.sum())
    if complete < model.d:
        from .errors import InsufficientDataError

        raise InsufficientDataError(
            f"need at least {model.d} complete cases, have {complete}"
        )

    def objective(beta):
        if not np.all(np.isfinite(beta)) or not model.domain_check(beta, data.x):
            return np.inf
        try:
            ev = el_statistic(data, model, beta, kind)
        except (SingularParameterError, FloatingPointError):
            return np.inf
        return ev.statistic if ev.converged else np.inf

    if not np.isfinite(objective(init)):
        raise SingularParameterError("initial point infeasible for the EL objective")
    res = minimize(
        objective,
        init,
        method="Nelder-Mead",
        options={"maxfev": max_evals, "maxiter": max_evals,
                 "xatol": 1e-10, "fatol": 1e-12},
    )
    beta_hat = np.asarray(res.x, dtype=float)
    if not np.isfinite(res.fun):
        raise SingularParameterError("every evaluated point was infeasible")
    mask = data.delta == 1
    residuals = data.y[mask] - model.predict(data.x[mask], beta_hat)
    return FitResult(
        method="mele",
        beta=beta_hat,
        converged=bool(res.success),
        iterations=int(res.nit),
        objective=float(res.fun),
        residuals=residuals,
    )
