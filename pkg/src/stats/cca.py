"""
Canonical Correlation Analysis by whitening and SVD.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy import linalg

from src.stats.matrix import DataMatrix
from src.stats.shares import normalize_l1
from src.utils.errors import DegenerateInput, RankDeficient, TooFewObservations
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_RIDGE = 1e-6
# Eigenvalues below this fraction of the largest make whitening ill-posed.
EIGEN_FLOOR = 1e-10


@dataclass(frozen=True)
class CcaResult:
    """
    Canonical correlations (non-increasing) and weights.

    x_weights[:, i] and y_weights[:, i] are the i-th canonical pair over the
    standardized X and Y variables. Shares are the L1-normalized first pair.
    """
    x_names: Tuple[str, ...]
    y_names: Tuple[str, ...]
    correlations: np.ndarray = field(repr=False)
    x_weights: np.ndarray = field(repr=False)
    y_weights: np.ndarray = field(repr=False)
    x_shares: np.ndarray = field(repr=False)
    y_shares: np.ndarray = field(repr=False)
    n_observations: int = 0

    @property
    def n_components(self) -> int:
        return int(self.correlations.size)

    def named_x_shares(self) -> Dict[str, float]:
        return {name: float(share) for name, share in zip(self.x_names, self.x_shares)}

    def named_y_shares(self) -> Dict[str, float]:
        return {name: float(share) for name, share in zip(self.y_names, self.y_shares)}


def standardize(values: np.ndarray, names: Tuple[str, ...]) -> np.ndarray:
    """Center columns and scale them to unit sample variance."""
    centered = values - values.mean(axis=0)
    scale = centered.std(axis=0, ddof=1)
    constant = [name for name, s in zip(names, scale) if s == 0.0]
    if constant:
        raise DegenerateInput(f"constant columns must be dropped before CCA: {', '.join(constant)}")
    return centered / scale


def inverse_sqrt(matrix: np.ndarray, block: str) -> np.ndarray:
    """Symmetric inverse square root via eigendecomposition."""
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    largest = eigenvalues[-1]
    if largest <= 0 or eigenvalues[0] <= EIGEN_FLOOR * largest:
        raise RankDeficient(
            f"{block} covariance is singular (smallest eigenvalue {eigenvalues[0]:.3g}); "
            f"use a positive ridge or drop collinear columns"
        )
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T


def cca(x: DataMatrix, y: DataMatrix, ridge: float = DEFAULT_RIDGE) -> CcaResult:
    """
    Canonical Correlation Analysis between two variable blocks.

    Args:
        x: n x p matrix, constant columns already removed
        y: n x q matrix over the same observations
        ridge: Non-negative value added to both covariance diagonals

    Returns:
        CcaResult with min(p, q) components; each pair is signed so the
        largest-magnitude X weight is positive

    Raises:
        TooFewObservations: n <= max(p, q) + 1
        RankDeficient: a covariance block cannot be whitened
    """
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    if x.n_rows != y.n_rows:
        raise ValueError(f"row counts differ: {x.n_rows} vs {y.n_rows}")

    n, p, q = x.n_rows, x.n_columns, y.n_columns
    if n <= max(p, q) + 1:
        raise TooFewObservations(f"CCA of {p} x {q} variables needs more than {max(p, q) + 1} rows, got {n}")

    xs = standardize(x.values, x.columns)
    ys = standardize(y.values, y.columns)

    sxx = xs.T @ xs / (n - 1) + ridge * np.eye(p)
    syy = ys.T @ ys / (n - 1) + ridge * np.eye(q)
    sxy = xs.T @ ys / (n - 1)

    wx = inverse_sqrt(sxx, "X")
    wy = inverse_sqrt(syy, "Y")
    u, singular, vt = linalg.svd(wx @ sxy @ wy, full_matrices=False)

    k = min(p, q)
    correlations = np.clip(singular[:k], 0.0, 1.0)
    x_weights = wx @ u[:, :k]
    y_weights = wy @ vt.T[:, :k]

    for i in range(k):
        pivot = int(np.argmax(np.abs(x_weights[:, i])))
        if x_weights[pivot, i] < 0:
            x_weights[:, i] = -x_weights[:, i]
            y_weights[:, i] = -y_weights[:, i]

    logger.debug(f"CCA {p}x{q} over {n} rows: rho={np.round(correlations, 4).tolist()}")
    return CcaResult(
        x_names=x.columns,
        y_names=y.columns,
        correlations=correlations,
        x_weights=x_weights,
        y_weights=y_weights,
        x_shares=normalize_l1(x_weights[:, 0]),
        y_shares=normalize_l1(y_weights[:, 0]),
        n_observations=n,
    )
