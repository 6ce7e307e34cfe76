"""
Minimum-norm-point algorithms over the convex hull of a finite point set.

Implements Wolfe's active-set iteration (corrals), an exact face
enumeration used as a fallback and as an oracle, and an NNLS-based
solver that shares no code with the other two.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Tuple
import logging

import numpy as np
from scipy.optimize import nnls

from src.utils.exceptions import SolverError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinNormResult:
    """
    Minimum-norm point of conv(points) with its convex weights.

    `weights[i]` is the coefficient of points[i]; weights are
    nonnegative and sum to one.
    """

    point: np.ndarray
    weights: np.ndarray
    iterations: int
    method: str

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.point))


def _as_point_matrix(points: np.ndarray) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValidationError("points must be a nonempty 2-D array", "points", P.shape)
    return P


def affine_minimizer(P: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimum-norm point of the affine hull of the rows of P.

    Solves the KKT system [[P P^T, 1], [1^T, 0]] [a; mu] = [0; 1].

    Returns:
        (point, affine coefficients a) with sum(a) == 1
    """
    k = P.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = P @ P.T
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    alpha = solution[:k]
    return alpha @ P, alpha


def _finalize(P: np.ndarray, weights: np.ndarray, iterations: int, method: str) -> MinNormResult:
    weights = np.clip(weights, 0.0, None)
    weights = weights / weights.sum()
    return MinNormResult(point=weights @ P, weights=weights, iterations=iterations, method=method)


class MinNormPointSolvers:
    """
    Solvers for min |s| over s in conv{P_1, ..., P_N}.
    """

    @staticmethod
    def wolfe(
        points: np.ndarray,
        tolerance: float = 1e-9,
        max_iterations: Optional[int] = None,
    ) -> MinNormResult:
        """
        Wolfe's active-set minimum-norm-point algorithm.

        Ties between candidate points are broken toward the lowest
        index so repeated runs visit the same corrals.

        Args:
            points: N x d matrix, one point per row
            tolerance: optimality tolerance on <x, x> - min_j <P_j, x>
            max_iterations: cap on major plus minor cycles,
                default 10 * N * d

        Raises:
            SolverError: If the cap is reached before optimality
        """
        P = _as_point_matrix(points)
        n_points, dim = P.shape
        cap = max_iterations if max_iterations is not None else max(10 * n_points * max(dim, 1), 50)
        scale = max(1.0, float(np.max(np.einsum("ij,ij->i", P, P))))

        norms = np.einsum("ij,ij->i", P, P)
        start = int(np.flatnonzero(norms <= norms.min() + tolerance * scale)[0])
        corral: List[int] = [start]
        lam = np.array([1.0])
        x = P[start].copy()
        iterations = 0

        while True:
            iterations += 1
            if iterations > cap:
                raise SolverError(
                    f"Wolfe iteration did not converge within {cap} cycles", iterations
                )

            xx = float(x @ x)
            if xx <= tolerance * tolerance:
                break
            products = P @ x
            best = float(products.min())
            if xx - best <= tolerance * scale:
                break
            j = int(np.flatnonzero(products <= best + tolerance * scale)[0])
            if j in corral:
                # numerically stalled at an optimal corral
                break
            corral.append(j)
            lam = np.append(lam, 0.0)

            # minor cycles
            while True:
                iterations += 1
                if iterations > cap:
                    raise SolverError(
                        f"Wolfe iteration did not converge within {cap} cycles", iterations
                    )
                y, alpha = affine_minimizer(P[corral])
                if np.all(alpha > tolerance):
                    x, lam = y, alpha
                    break
                negative = alpha <= tolerance
                ratios = lam[negative] / (lam[negative] - alpha[negative])
                theta = float(np.min(ratios)) if ratios.size else 0.0
                lam = theta * alpha + (1.0 - theta) * lam
                x = lam @ P[corral]
                drop = np.flatnonzero(lam <= tolerance)
                if drop.size == 0:
                    drop = np.flatnonzero(negative)[:1]
                keep = np.setdiff1d(np.arange(len(corral)), drop[:1])
                corral = [corral[i] for i in keep]
                lam = lam[keep]
                lam = lam / lam.sum()
                x = lam @ P[corral]

        weights = np.zeros(n_points)
        weights[corral] = lam
        return _finalize(P, weights, iterations, "wolfe")

    @staticmethod
    def face_enumeration(points: np.ndarray, tolerance: float = 1e-9) -> MinNormResult:
        """
        Exact minimum by enumerating candidate faces.

        The optimum lies in the relative interior of a face spanned by at
        most d + 1 affinely independent points, where it coincides with
        that face's affine minimizer. Every subset is tried; candidates
        with nonnegative affine weights are points of the hull.
        """
        P = _as_point_matrix(points)
        n_points, dim = P.shape
        best_norm = np.inf
        best_weights: Optional[np.ndarray] = None
        evaluated = 0
        for size in range(1, min(n_points, dim + 1) + 1):
            for subset in combinations(range(n_points), size):
                evaluated += 1
                y, alpha = affine_minimizer(P[list(subset)])
                if np.any(alpha < -tolerance):
                    continue
                # reject inconsistent KKT solutions
                if abs(alpha.sum() - 1.0) > 1e-7:
                    continue
                value = float(np.linalg.norm(y))
                if value < best_norm - 1e-15:
                    best_norm = value
                    best_weights = np.zeros(n_points)
                    best_weights[list(subset)] = alpha
        assert best_weights is not None  # singletons always qualify
        return _finalize(P, best_weights, evaluated, "faces")

    @staticmethod
    def nnls(points: np.ndarray, penalty: float = 1e4) -> MinNormResult:
        """
        Penalised NNLS formulation: min |P^T w| s.t. w >= 0, sum w = 1.

        The simplex constraint is enforced through a heavily weighted
        extra row, accurate to roughly 1/penalty^2.
        """
        P = _as_point_matrix(points)
        n_points = P.shape[0]
        rho = penalty * (1.0 + float(np.abs(P).max()))
        A = np.vstack([P.T, rho * np.ones((1, n_points))])
        b = np.zeros(A.shape[0])
        b[-1] = rho
        weights, _ = nnls(A, b, maxiter=50 * n_points + 100)
        return _finalize(P, weights, 1, "nnls")


def min_norm_point(
    points: np.ndarray,
    tolerance: float = 1e-9,
    brute_force_limit: int = 12,
    method: str = "auto",
) -> MinNormResult:
    """
    Minimum-norm point of conv(points).

    Args:
        points: N x d matrix, one point per row
        tolerance: optimality tolerance
        brute_force_limit: largest N for the face-enumeration fallback
        method: "auto" (Wolfe with fallback), "wolfe", "faces" or "nnls"

    Raises:
        SolverError: If Wolfe fails and N exceeds the fallback limit
    """
    if method == "faces":
        return MinNormPointSolvers.face_enumeration(points, tolerance)
    if method == "nnls":
        return MinNormPointSolvers.nnls(points)
    if method not in ("auto", "wolfe"):
        raise ValidationError(f"Unknown min-norm method '{method}'", "method", method)

    try:
        return MinNormPointSolvers.wolfe(points, tolerance)
    except SolverError:
        n_points = np.asarray(points).shape[0]
        if method == "wolfe" or n_points > brute_force_limit:
            raise
        logger.warning(
            "Wolfe solver did not converge, using face enumeration",
            extra={"generators": n_points},
        )
        return MinNormPointSolvers.face_enumeration(points, tolerance)
