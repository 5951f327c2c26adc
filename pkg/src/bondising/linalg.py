"""Dense matrix kernels used by the tensor-network layers.

Two operations live here: a truncated singular value decomposition for bond
truncation, and a seeded power iteration for the dominant eigenpair of a
linear map given only through its action on vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InvalidInputError, NumericFailure

__all__ = [
    "SvdResult",
    "truncated_svd",
    "dominant_eigenpair",
    "dense_dominant_eigenpair",
]


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD ``m ~ u @ diag(s) @ vh``.

    ``truncation_error`` is the discarded weight relative to the total,
    ``sqrt(sum(discarded s**2) / sum(all s**2))``.
    """

    u: np.ndarray
    s: np.ndarray
    vh: np.ndarray
    truncation_error: float

    @property
    def rank(self) -> int:
        return len(self.s)

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.vh


def _as_finite_matrix(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return m


def truncated_svd(m, chi_max: int, cutoff: float = 0.0) -> SvdResult:
    """Singular value decomposition truncated to at most ``chi_max`` values.

    Singular values smaller than ``cutoff * s[0]`` are discarded as well. At
    least one singular value is always kept.

    Raises
    ------
    InvalidInputError
        If ``m`` is not a finite matrix, ``chi_max < 1`` or ``cutoff < 0``.
    NumericFailure
        If both the divide-and-conquer and the QR-iteration LAPACK drivers
        fail to converge.
    """
    m = _as_finite_matrix(m)
    if chi_max < 1:
        raise InvalidInputError(f"chi_max must be >= 1, got {chi_max}")
    if cutoff < 0:
        raise InvalidInputError(f"cutoff must be >= 0, got {cutoff}")

    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails on nearly degenerate spectra; gesvd is slower but sturdier
        try:
            u, s, vh = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
        except np.linalg.LinAlgError as exc:
            raise NumericFailure(
                f"SVD did not converge for a {m.shape[0]}x{m.shape[1]} matrix "
                f"(norm {np.linalg.norm(m):.3e}) with either gesdd or gesvd"
            ) from exc

    keep = min(chi_max, int(np.count_nonzero(s >= cutoff * s[0])))
    keep = max(keep, 1)
    total = float(np.sum(s**2))
    discarded = float(np.sum(s[keep:] ** 2))
    err = float(np.sqrt(discarded / total)) if total > 0 and discarded > 0 else 0.0
    return SvdResult(u[:, :keep], s[:keep], vh[:keep, :], err)


def dominant_eigenpair(
    apply: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float = 1e-12,
    max_iter: int = 10_000,
    seed: int = 0,
    stall_window: int = 500,
) -> tuple[complex, np.ndarray]:
    """Largest-magnitude eigenpair of a linear map by power iteration.

    The eigenvalue is the Rayleigh quotient of the current unit iterate. The
    iteration stops once ``|A v - mu v| <= tol * max(1, |mu|)``. If the
    residual stops improving for ``stall_window`` iterations the iteration
    restarts from a fresh seeded vector.

    Parameters
    ----------
    apply : callable
        Maps a complex vector of length ``n`` to its image.
    n : int
        Dimension of the vector space.
    tol : float
        Residual tolerance.
    max_iter : int
        Iteration budget summed over all restarts.
    seed : int
        Seed for the start vectors; the result is deterministic given it.

    Returns
    -------
    eigenvalue : complex
    eigenvector : ndarray
        Unit-norm eigenvector.

    Raises
    ------
    ConvergenceError
        When the budget is exhausted. Eigenvalues tied in magnitude (e.g. the
        spectrum ``{+1, -1}``) end up here; the exception carries the last
        residual and a spectral-radius estimate.
    """
    if n < 1:
        raise InvalidInputError(f"dimension must be >= 1, got {n}")
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")

    rng = np.random.default_rng(seed)

    def fresh():
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return v / np.linalg.norm(v)

    v = fresh()
    best = np.inf
    since_best = 0
    restarts = 0
    mu = 0j
    res = np.inf
    growth = 0.0
    for it in range(1, max_iter + 1):
        w = np.asarray(apply(v), dtype=complex)
        if w.shape != (n,):
            raise InvalidInputError(f"map returned shape {w.shape}, expected ({n},)")
        if not np.all(np.isfinite(w)):
            raise NumericFailure(f"map produced non-finite values at iteration {it}")
        mu = complex(np.vdot(v, w))
        res = float(np.linalg.norm(w - mu * v))
        growth = float(np.linalg.norm(w))
        if res <= tol * max(1.0, abs(mu)):
            return mu, v
        if growth == 0.0:
            # v lies in the kernel, but a zero residual would have returned above
            v = fresh()
            continue
        v = w / growth

        if res < 0.999 * best:
            best, since_best = res, 0
        else:
            since_best += 1
        if since_best >= stall_window:
            restarts += 1
            v = fresh()
            best, since_best = np.inf, 0

    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations "
        f"({restarts} restarts, last residual {res:.3e}, |mu|={abs(mu):.6g}, "
        f"growth {growth:.6g}); the leading eigenvalue may be tied in magnitude",
        residual=res,
        iterations=max_iter,
        estimate=mu,
        magnitude=growth,
    )


def dense_dominant_eigenpair(matrix: np.ndarray) -> tuple[complex, np.ndarray]:
    """Largest-magnitude eigenpair of an explicit square matrix via full diagonalization."""
    matrix = _as_finite_matrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"matrix must be square, got {matrix.shape}")
    try:
        vals, vecs = np.linalg.eig(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"dense eigendecomposition failed: {exc}") from exc
    k = int(np.argmax(np.abs(vals)))
    vec = vecs[:, k]
    return complex(vals[k]), vec / np.linalg.norm(vec)
