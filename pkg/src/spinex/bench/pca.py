"""Two-component PCA by power iteration, for plotting detections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..validation import FeatureMatrix

TOL = 1e-9
MAX_ITER = 1000


@dataclass(frozen=True)
class Projection:
    coords: np.ndarray  # (n, 2)
    components: np.ndarray  # (2, d), orthonormal rows
    eigenvalues: np.ndarray  # (2,) population-covariance eigenvalues
    second_degenerate: bool


def _orient(v):
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _power(c, start, against=None):
    v = start / np.linalg.norm(start)
    for _ in range(MAX_ITER):
        w = c @ v
        raw = np.linalg.norm(w)
        if against is not None:
            # two Gram-Schmidt passes keep w orthogonal at roundoff scale
            w -= (w @ against) * against
            w -= (w @ against) * against
        norm = np.linalg.norm(w)
        if norm == 0 or norm <= 1e-8 * raw:
            # nothing left outside `against`: the remaining spectrum is zero
            return v, float(v @ c @ v)
        w /= norm
        if w @ v < 0:
            w = -w
        done = np.linalg.norm(w - v) < TOL
        v = w
        if done:
            break
    return v, float(v @ c @ v)


def _start_vector(c, against=None):
    # column of largest norm; with `against`, orthogonalised first
    cols = c.T.copy()
    before = np.linalg.norm(cols, axis=1)
    if against is not None:
        cols -= np.outer(cols @ against, against)
    norms = np.linalg.norm(cols, axis=1)
    j = int(np.argmax(norms))
    # a column that was nearly parallel to `against` leaves only roundoff
    if norms[j] > 1e-8 * before[j]:
        return cols[j]
    basis = np.eye(c.shape[0])
    if against is None:
        return basis[0]
    basis -= np.outer(basis @ against, against)
    return basis[int(np.argmax(np.linalg.norm(basis, axis=1)))]


def pca_project_2d(m) -> Projection:
    """Project rows onto the top two principal axes.

    Columns are centred, the covariance (divisor n) is formed, and the top
    eigenvector found by power iteration; the second comes from the same
    iteration on the deflated covariance, kept orthogonal to the first.
    Each component's first nonzero loading is made positive. If the second
    eigenvalue is numerically zero, its coordinates are all zero and
    ``second_degenerate`` is set.
    """
    x = m.values if isinstance(m, FeatureMatrix) else np.asarray(m, dtype=np.float64)
    n, d = x.shape
    if n < 2 or d < 2:
        raise ValueError(f"need at least 2 rows and 2 columns, got {x.shape}")
    xc = x - x.mean(axis=0)
    c = xc.T @ xc / n

    v1, lam1 = _power(c, _start_vector(c))
    v1 = _orient(v1)
    deflated = c - lam1 * np.outer(v1, v1)
    v2, _ = _power(deflated, _start_vector(deflated, v1), against=v1)
    v2 -= (v2 @ v1) * v1
    v2 = _orient(v2 / np.linalg.norm(v2))
    lam2 = float(v2 @ c @ v2)

    scale = max(abs(lam1), np.finfo(float).tiny)
    degenerate = lam2 <= 1e-12 * scale
    coords = np.column_stack([xc @ v1, np.zeros(n) if degenerate else xc @ v2])
    return Projection(coords, np.vstack([v1, v2]), np.array([lam1, lam2]), bool(degenerate))
