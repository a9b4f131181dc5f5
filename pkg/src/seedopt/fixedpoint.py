"""Fixed points for the single-resource case.

With one resource, a machine ``m`` replicates itself exactly when ``G(m) = m``.
This module covers the constructive cases: Banach iteration for contractions of
R^n and the eigenvalue-1 subspace of a finite-dimensional linear operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping

import numpy as np

from .model import CostSchema, GenerationRule, GenerationSystem, MachineSpec

__all__ = [
    "ContractionProblem",
    "FixedPointResult",
    "LinearOperator",
    "NonConvergenceError",
    "affine_problem",
    "contraction_iterate",
    "derivative_operator",
    "linear_fixed_space",
    "spectral_norm",
    "system_from_map",
]

_EPS = float(np.finfo(float).eps)
# relative slack before an observed step ratio counts as exceeding lambda
_RATIO_SLACK = 1e-9


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, last_iterate: np.ndarray, residual: float):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass(frozen=True)
class ContractionProblem:
    map: Callable[[np.ndarray], np.ndarray]
    lam: float
    x0: np.ndarray
    tol: float = 1e-10
    max_iter: int = 10_000
    # absolute bound on the rounding error of one map evaluation;
    # None assumes a map accurate to a few ulps per component
    eval_error: float | None = None

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError(f"contraction modulus must lie in (0, 1), got {self.lam}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.eval_error is not None and not self.eval_error >= 0:
            raise ValueError("eval_error must be nonnegative")
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))


@dataclass(frozen=True)
class FixedPointResult:
    point: np.ndarray
    iterations: int
    residual: float
    certified_bound: float
    diagnostics: tuple[str, ...] = field(default=())


def contraction_iterate(p: ContractionProblem) -> FixedPointResult:
    """Iterate ``x <- map(x)`` until successive iterates are within ``tol``.

    With residual ``r`` and per-evaluation rounding bound ``e``, the true fixed
    point lies within ``certified_bound = (lam * r + e) / (1 - lam)`` of the
    returned point, provided the map really is a ``lam``-contraction.  In exact
    arithmetic (``e = 0``) this is the usual ``lam / (1 - lam) * r``.  Steps that
    shrink by less than ``lam`` beyond rounding noise are reported in
    ``diagnostics`` since they contradict the claimed modulus.
    """
    x = p.x0
    prev_step = None
    diagnostics: list[str] = []
    residual = math.inf
    for k in range(1, p.max_iter + 1):
        x_new = np.atleast_1d(np.asarray(p.map(x), dtype=float))
        if x_new.shape != x.shape:
            raise ValueError(f"map changed the shape {x.shape} -> {x_new.shape}")
        residual = float(np.linalg.norm(x_new - x))
        if not math.isfinite(residual):
            raise NonConvergenceError(f"iterate diverged at step {k}", x_new, residual)
        if p.eval_error is None:
            err = 4 * x.size * _EPS * float(np.linalg.norm(x_new))
        else:
            err = p.eval_error
        # the computed norm itself carries relative error ~ size * eps
        err += (x.size + 2) * _EPS * residual
        if prev_step is not None and residual > p.lam * prev_step * (1 + _RATIO_SLACK) + 2 * err:
            diagnostics.append(
                f"contraction violated at step {k}: observed ratio {residual / prev_step:.6g} > {p.lam:.6g}"
            )
        x = x_new
        if residual <= p.tol:
            bound = (p.lam * residual + err) / (1 - p.lam)
            return FixedPointResult(x, k, residual, bound, tuple(diagnostics))
        prev_step = residual
    raise NonConvergenceError(
        f"no convergence within {p.max_iter} iterations (residual {residual:.3g})", x, residual
    )


def spectral_norm(a) -> float:
    return float(np.linalg.norm(np.atleast_2d(np.asarray(a, dtype=float)), 2))


def affine_problem(matrix, offset, *, x0=None, tol: float = 1e-10,
                   max_iter: int = 10_000) -> ContractionProblem:
    """Contraction problem for ``x -> A x + b`` with modulus ``||A||_2``.

    The evaluation error bound is ``gamma_{n+1} (||A||_F R + ||b||)`` where
    ``R = max(||x0||, ||b|| / (1 - lam))`` bounds every iterate.
    Raises ``ValueError`` when the spectral norm is not below one.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    b = np.atleast_1d(np.asarray(offset, dtype=float))
    if a.shape[0] != a.shape[1] or a.shape[0] != b.shape[0]:
        raise ValueError(f"matrix {a.shape} and offset {b.shape} do not form a self-map")
    lam = spectral_norm(a)
    if not lam < 1:
        raise ValueError(f"not a contraction: spectral norm {lam:.6g} >= 1")
    # a zero matrix is a constant map; any modulus in (0, 1) certifies it
    lam = max(lam, np.finfo(float).tiny)
    start = np.zeros_like(b) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    if start.shape != b.shape:
        raise ValueError(f"start vector {start.shape} does not match offset {b.shape}")
    n = b.shape[0]
    gamma = (n + 1) * _EPS / (1 - (n + 1) * _EPS)
    b_norm = float(np.linalg.norm(b))
    radius = max(float(np.linalg.norm(start)), b_norm / (1 - lam))
    err = gamma * (float(np.linalg.norm(a, "fro")) * radius + b_norm)
    return ContractionProblem(lambda x: a @ x + b, lam, start, tol, max_iter, eval_error=err)


@dataclass(frozen=True)
class LinearOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def linear_fixed_space(op: LinearOperator, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis of ``{v : A v = v}``.

    Singular values of ``A - I`` at or below ``tol * max(1, ||A||_inf)`` are
    treated as zero, so each returned ``v`` has ``||A v - v||`` within that
    threshold.  The scale is taken from ``A`` rather than ``A - I`` because the
    latter is pure rounding noise when ``A`` is (close to) the identity.
    An empty list means zero is the only fixed point.
    """
    if not isinstance(op, LinearOperator):
        op = LinearOperator(op)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = op.dim
    if n == 0:
        return []
    shifted = op.matrix - np.eye(n)
    _, s, vh = np.linalg.svd(shifted)
    threshold = tol * max(1.0, float(np.linalg.norm(op.matrix, np.inf)))
    rank = int(np.sum(s > threshold))
    basis = []
    for v in vh[rank:]:
        pivot = v[np.argmax(np.abs(v) > tol)]
        basis.append(v if pivot >= 0 else -v)
    return basis


def derivative_operator(d: int) -> LinearOperator:
    """Differentiation on polynomials of degree <= d in the basis 1, t, ..., t^d."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    m = np.zeros((d + 1, d + 1))
    for j in range(1, d + 1):
        m[j - 1, j] = j
    return LinearOperator(m)


def system_from_map(mapping: Mapping[Hashable, Hashable], resource: str = "r") -> GenerationSystem:
    """Single-resource generation system realizing a self-map of a finite set.

    Each machine ``m`` gets one rule ``({m}, {resource}) -> {mapping[m]}`` with zero cost.
    """
    ids = {m: str(m) for m in mapping}
    if resource in ids.values():
        raise ValueError(f"resource id {resource!r} collides with a machine")
    rules = [
        GenerationRule(f"G[{ids[m]}]", {ids[m]}, {resource}, {ids[mapping[m]]}, (0,))
        for m in mapping
    ]
    return GenerationSystem([MachineSpec(i) for i in ids.values()], [resource],
                            CostSchema(("cost",)), rules)
