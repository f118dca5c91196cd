"""Streaming, mergeable estimation of patch mean and covariance.

Patch rows are accumulated as raw moments (sum and sum of outer products)
in double precision, so fitting is single-pass and shards can be fitted in
parallel and merged deterministically.  Finalization applies the unbiased
N/(N-1) covariance correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import ContractError

__all__ = ["GaussianStats", "StatsAccumulator"]

# Relative tolerances for the GaussianStats validity checks.
_SYM_RTOL = 1e-12
_DIAG_RTOL = 1e-12


def _as_matrix_rows(rows) -> NDArray[np.float64]:
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2:
        raise ContractError(f"expected a 2-D batch of row vectors, got ndim={x.ndim}")
    return x


@dataclass(frozen=True)
class GaussianStats:
    """First and second moments fitted to a set of vectors.

    Attributes
    ----------
    dim : int
        Vector dimension d.
    count : int
        Number of samples the moments were fitted from (>= 2).
    mean : ndarray, shape (d,)
    cov : ndarray, shape (d, d)
        Symmetric covariance with the unbiased normalization.
    """

    dim: int
    count: int
    mean: NDArray[np.float64]
    cov: NDArray[np.float64]

    def __post_init__(self):
        mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        cov = np.ascontiguousarray(self.cov, dtype=np.float64)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if self.count < 2:
            raise ContractError(f"GaussianStats needs count >= 2, got {self.count}")
        if mean.shape != (self.dim,):
            raise ContractError(f"mean shape {mean.shape} != ({self.dim},)")
        if cov.shape != (self.dim, self.dim):
            raise ContractError(f"cov shape {cov.shape} != ({self.dim}, {self.dim})")
        scale = np.abs(cov).max() if cov.size else 0.0
        if np.abs(cov - cov.T).max() > _SYM_RTOL * max(scale, 1.0):
            raise ContractError("covariance is not symmetric")
        if cov.size and np.diag(cov).min() < -_DIAG_RTOL * max(scale, 1.0):
            raise ContractError("covariance has a negative diagonal entry")

    @classmethod
    def from_moments(cls, mean, cov, count: int = 2) -> "GaussianStats":
        """Wrap externally known (e.g. analytic population) moments."""
        mean = np.asarray(mean, dtype=np.float64)
        return cls(dim=mean.shape[0], count=count, mean=mean, cov=np.asarray(cov, float))


@dataclass
class StatsAccumulator:
    """Raw-moment accumulator over d-dimensional rows.

    ``update`` folds batches in place; ``merge`` combines independently
    fitted accumulators (associative and commutative up to floating-point
    reassociation); ``finalize`` produces :class:`GaussianStats`.
    """

    dim: int
    count: int = 0
    sum: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]
    sum_outer: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.dim < 1:
            raise ContractError(f"dimension must be >= 1, got {self.dim}")
        if self.sum is None:
            self.sum = np.zeros(self.dim)
        if self.sum_outer is None:
            self.sum_outer = np.zeros((self.dim, self.dim))

    def update(self, rows) -> "StatsAccumulator":
        """Fold a (rows, dim) batch into the running moments."""
        x = _as_matrix_rows(rows)
        if x.shape[1] != self.dim:
            raise ContractError(f"batch width {x.shape[1]} != accumulator dim {self.dim}")
        if x.shape[0] == 0:
            return self
        self.count += x.shape[0]
        self.sum += x.sum(axis=0)
        gram = x.T @ x
        self.sum_outer += 0.5 * (gram + gram.T)
        return self

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        """Return a new accumulator holding the fieldwise sums."""
        if other.dim != self.dim:
            raise ContractError(f"cannot merge dims {self.dim} and {other.dim}")
        return StatsAccumulator(
            dim=self.dim,
            count=self.count + other.count,
            sum=self.sum + other.sum,
            sum_outer=self.sum_outer + other.sum_outer,
        )

    def finalize(self) -> GaussianStats:
        """Compute mean and unbiased covariance from the raw moments."""
        if self.count < 2:
            raise ContractError(f"need at least 2 samples to finalize, got {self.count}")
        mean = self.sum / self.count
        centered = self.sum_outer - self.count * np.outer(mean, mean)
        cov = centered / (self.count - 1)
        cov = 0.5 * (cov + cov.T)
        return GaussianStats(dim=self.dim, count=self.count, mean=mean, cov=cov)
