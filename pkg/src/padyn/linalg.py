"""Small dense linear-algebra helpers shared across the package."""

from __future__ import annotations

import numpy as np


def vec(m: np.ndarray) -> np.ndarray:
    """Row-major flattening of a matrix."""
    return np.ascontiguousarray(m).reshape(-1)


def herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def nullspace(m: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal columns spanning the numerical right null space of m."""
    m = np.asarray(m, dtype=complex)
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    cut = s[0] * rtol if s.size else 0.0
    rank = int(np.sum(s > cut))
    return vh[rank:].conj().T


def left_null_combos(rows: np.ndarray, rtol: float = 1e-8, scale: float | None = None) -> np.ndarray:
    """Columns v with sum_k v_k rows[k] ~ 0, via the small Gram matrix.

    Avoids the full SVD of a (count, length) matrix when length is large.
    Structurally zero rows sit at the eps-level noise floor of the Gram
    eigenvalues, so the cut combines a top-relative floor with an absolute
    one derived from `scale` (the natural row magnitude); the absolute term
    keeps the decision sound even when every row is numerically zero.
    """
    rows = np.asarray(rows, dtype=complex)
    gram = rows @ rows.conj().T
    w, u = np.linalg.eigh(gram)
    top = max(float(w[-1]), 0.0) if w.size else 0.0
    cut = top * 1e-12
    if scale is not None:
        cut = max(cut, (scale * rtol) ** 2)
    return u[:, w <= cut + 1e-300].conj()


def orthonormal_rows(rows: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis, as rows, of the row space of `rows`."""
    rows = np.asarray(rows, dtype=complex)
    if rows.size == 0:
        return rows.reshape(0, rows.shape[-1] if rows.ndim == 2 else 0)
    if rows.shape[1] > 4 * rows.shape[0]:
        # wide case: diagonalize the small Gram matrix instead of a full SVD
        gram = rows @ rows.conj().T
        w, u = np.linalg.eigh(gram)
        top = max(float(w[-1]), 0.0)
        keep = w > top * max(rtol * rtol, 1e-12)
        vecs = u[:, keep].conj().T @ rows
        norms = np.linalg.norm(vecs, axis=1, keepdims=True)
        return vecs / norms
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    cut = s[0] * rtol if s.size else 0.0
    rank = int(np.sum(s > cut))
    return vh[:rank]


class SpanTracker:
    """Incrementally maintained orthonormal span, for early-exit rank checks."""

    def __init__(self, length: int, rtol: float = 1e-8):
        self.length = length
        self.rtol = rtol
        self._rows: list[np.ndarray] = []
        self._q: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self._rows)

    def _matrix(self) -> np.ndarray:
        if self._q is None or self._q.shape[0] != len(self._rows):
            self._q = (
                np.vstack(self._rows)
                if self._rows
                else np.zeros((0, self.length), dtype=complex)
            )
        return self._q

    def add(self, v: np.ndarray) -> bool:
        """Add a vector; returns True when it increased the span."""
        v = np.asarray(v, dtype=complex).reshape(-1)
        scale = np.linalg.norm(v)
        if scale == 0.0:
            return False
        w = v
        if self._rows:
            q = self._matrix()
            w = v - q.T @ (q.conj() @ v)
            # one re-orthogonalization pass keeps the basis numerically tight
            w = w - q.T @ (q.conj() @ w)
        norm = np.linalg.norm(w)
        if norm <= self.rtol * scale:
            return False
        self._rows.append(w / norm)
        self._q = None
        return True


def ad_units_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max deviation between Ad(a) and Ad(b) applied to all matrix units."""
    if a.shape != b.shape:
        return float("inf")
    n = a.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            ea = np.outer(a[:, i], a[:, j].conj())
            eb = np.outer(b[:, i], b[:, j].conj())
            worst = max(worst, float(np.abs(ea - eb).max()))
    return worst
