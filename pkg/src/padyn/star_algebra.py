"""Concrete *-closed complex matrix algebras and their block decompositions.

Algebras are spans of matrices closed under products and adjoints.  The
block profile (multiset of simple-summand sizes) is obtained numerically:
the center is cut out by commutation equations against generic elements and
then certified against the generators, a generic self-adjoint central
element is split spectrally, and block sizes come from compression ranks.
Two finite-dimensional algebras are strongly Morita equivalent exactly when
their block counts agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import herm, left_null_combos, orthonormal_rows, random_unitary, vec

DEFAULT_TOL = 1e-9
ROUND_TOL = 1e-6


class DegenerateDecomposition(RuntimeError):
    """Spectral splitting failed repeatedly; the instance is numerically degenerate."""


@dataclass(frozen=True)
class BlockStructure:
    """Multiset of simple-summand sizes of a finite-dimensional *-algebra."""

    block_dims: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    def as_list(self) -> list[int]:
        return list(self.block_dims)


def morita_equivalent(b1: BlockStructure, b2: BlockStructure) -> bool:
    """Finite-dimensional criterion: same number of simple summands."""
    return b1.count == b2.count


class MatrixStarAlgebra:
    """A *-closed span of N x N matrices with its corner unit."""

    def __init__(
        self,
        ambient_dim: int,
        basis: Sequence[np.ndarray],
        generators: Sequence[np.ndarray] | None = None,
        tol: float = DEFAULT_TOL,
    ):
        self.ambient_dim = int(ambient_dim)
        n = self.ambient_dim
        mats = [np.asarray(b, dtype=complex) for b in basis]
        for b in mats:
            if b.shape != (n, n):
                raise ValueError(f"basis matrix has shape {b.shape}, ambient is {n}")
        stacked = (
            np.stack([vec(b) for b in mats]) if mats else np.zeros((0, n * n), dtype=complex)
        )
        self.onb = orthonormal_rows(stacked)
        self.stack = self.onb.reshape(-1, n, n)
        self.generators = [np.asarray(g, dtype=complex) for g in generators] if generators else None
        self.tol = tol
        self._unit: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.stack.shape[0]

    @property
    def basis(self) -> list[np.ndarray]:
        return [self.stack[k] for k in range(self.dim)]

    def span_residual(self, x: np.ndarray) -> float:
        v = vec(np.asarray(x, dtype=complex))
        proj = self.onb.T @ (self.onb.conj() @ v)
        return float(np.abs(v - proj).max())

    def span_residual_batch(self, xs: np.ndarray) -> np.ndarray:
        """Residuals for a stack of matrices (k, N, N)."""
        v = xs.reshape(xs.shape[0], -1)
        proj = (v @ self.onb.conj().T) @ self.onb
        return np.abs(v - proj).max(axis=1) if v.size else np.zeros(0)

    def contains(self, x: np.ndarray, tol: float | None = None) -> bool:
        scale = max(1.0, float(np.abs(x).max()))
        return self.span_residual(x) <= (tol if tol is not None else self.tol) * scale

    def combine(self, coeffs: np.ndarray) -> np.ndarray:
        """Linear combination(s) of the orthonormal basis: coeffs (..., dim)."""
        return np.tensordot(coeffs, self.stack, axes=([-1], [0]))

    def closure_residual(self, sample: int | None = None, seed: int = 0) -> float:
        """Max span residual over basis products (all pairs, or a random sample)."""
        rng = np.random.default_rng(seed)
        m = self.dim
        worst = float(self.span_residual_batch(self.stack.conj().swapaxes(1, 2)).max()) if m else 0.0
        if sample is not None and sample < m * m:
            for _ in range(sample):
                i, j = rng.integers(0, m, size=2)
                worst = max(worst, self.span_residual(self.stack[i] @ self.stack[j]))
            return worst
        for i in range(m):
            prods = self.stack[i][None, :, :] @ self.stack
            worst = max(worst, float(self.span_residual_batch(prods).max()))
        return worst

    @property
    def unit(self) -> np.ndarray:
        """The unit of the algebra: a projection, not necessarily the ambient identity."""
        if self._unit is None:
            s = np.einsum("mij,mkj->ik", self.stack, self.stack.conj())
            w, v = np.linalg.eigh(s)
            cut = max(float(w[-1]), 1.0) * 1e-12
            keep = v[:, w > cut]
            p = keep @ keep.conj().T
            if self.span_residual(p) > self.tol * 10:
                raise AssertionError("corner unit does not lie in the span; basis is not an algebra")
            self._unit = p
        return self._unit


def star_closure(
    generators: Sequence[np.ndarray], ambient_dim: int, tol: float = DEFAULT_TOL
) -> MatrixStarAlgebra:
    """Smallest *-closed multiplicatively closed span containing the generators."""
    gens = [np.asarray(g, dtype=complex) for g in generators]
    current: list[np.ndarray] = []
    for g in gens:
        current.extend([g, g.conj().T])
    alg = MatrixStarAlgebra(ambient_dim, current, tol=tol)
    while True:
        fresh = []
        for i in range(alg.dim):
            prods = alg.stack[i][None, :, :] @ alg.stack
            bad = alg.span_residual_batch(prods) > tol
            fresh.extend(prods[bad])
        if not fresh:
            return MatrixStarAlgebra(ambient_dim, alg.basis, generators=gens, tol=tol)
        alg = MatrixStarAlgebra(ambient_dim, list(alg.basis) + fresh, tol=tol)


@dataclass(frozen=True)
class WedderburnResult:
    blocks: BlockStructure
    center_dim: int
    commutation_residual: float


def _center_coefficients(
    alg: MatrixStarAlgebra, rng: np.random.Generator, sv_rtol: float = 1e-8
) -> tuple[np.ndarray, float]:
    """Coefficient basis of the center against alg's orthonormal basis.

    Iteratively intersects commutants of generic self-adjoint elements; the
    result is certified by the worst commutator residual against the stored
    generators (falling back to the whole basis).
    """
    m = alg.dim
    coeffs = np.eye(m, dtype=complex)
    last_dim = -1
    for _ in range(8):
        if coeffs.shape[1] == 0:
            break
        cvec = rng.normal(size=m) + 1j * rng.normal(size=m)
        gmat = herm(alg.combine(cvec))
        cand = alg.combine(coeffs.T)  # (c, N, N)
        comms = cand @ gmat - gmat @ cand
        flat = comms.reshape(comms.shape[0], comms.shape[1] * comms.shape[2])
        null = left_null_combos(flat, sv_rtol, scale=float(np.linalg.norm(gmat)))
        coeffs = coeffs @ null
        if coeffs.shape[1] == last_dim:
            break
        last_dim = coeffs.shape[1]
    checks = alg.generators if alg.generators is not None else alg.basis
    center = alg.combine(coeffs.T)
    worst = 0.0
    for q in checks:
        res = center @ q - q @ center
        if res.size:
            worst = max(worst, float(np.abs(res).max()))
    return coeffs, worst


def wedderburn(
    alg: MatrixStarAlgebra,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    retries: int = 5,
) -> WedderburnResult:
    """Block decomposition by spectral splitting of a generic central element."""
    m = alg.dim
    if m == 0:
        return WedderburnResult(BlockStructure(()), 0, 0.0)
    n_amb = alg.ambient_dim
    unit = alg.unit
    last_error = "no attempt"
    for attempt in range(retries):
        rng = np.random.default_rng(seed + 7919 * attempt)
        coeffs, comm_res = _center_coefficients(alg, rng)
        c = coeffs.shape[1]
        if c == 0 or comm_res > max(tol * 100, 1e-7):
            last_error = f"center finding failed (dim {c}, residual {comm_res:.3e})"
            continue
        center = alg.combine(coeffs.T)
        weights = rng.normal(size=c)
        z = herm(np.tensordot(weights, center + center.conj().swapaxes(1, 2), axes=1))
        scale = max(1.0, float(np.abs(z).max()))
        shift = 3.0 * scale
        ztil = z + shift * unit
        w, v = np.linalg.eigh(ztil)
        gap = max(1e-8 * shift, 1e-10)
        clusters: list[list[int]] = [[0]]
        for i in range(1, n_amb):
            if w[i] - w[i - 1] > gap:
                clusters.append([i])
            else:
                clusters[-1].append(i)
        live = [idx for idx in clusters if abs(w[idx[0]]) > shift / 2]
        if len(live) != c:
            last_error = f"eigenvalue clusters ({len(live)}) do not match center dimension ({c})"
            continue
        dims = []
        ok = True
        for idx in live:
            vi = v[:, idx]
            comp = np.matmul(vi.conj().T, alg.stack @ vi)
            flat = comp.reshape(m, -1)
            s = np.linalg.svd(flat, compute_uv=False)
            cut = (float(s[0]) if s.size else 0.0) * 1e-8
            rank = int(np.sum(s > cut))
            ni = int(round(np.sqrt(rank)))
            if abs(ni * ni - rank) > ROUND_TOL or ni < 1:
                ok = False
                last_error = f"compression rank {rank} is not a perfect square"
                break
            dims.append(ni)
        if not ok:
            continue
        if sum(n * n for n in dims) != m:
            last_error = f"block dims {dims} do not sum to algebra dimension {m}"
            continue
        return WedderburnResult(BlockStructure(tuple(sorted(dims))), c, comm_res)
    raise DegenerateDecomposition(f"wedderburn failed after {retries} attempts: {last_error}")


def is_positive(x: np.ndarray, alg: MatrixStarAlgebra, tol: float = DEFAULT_TOL) -> bool:
    """Whether a self-adjoint element of the algebra is positive semidefinite."""
    x = np.asarray(x, dtype=complex)
    scale = max(1.0, float(np.abs(x).max()))
    if np.abs(x - x.conj().T).max() > tol * scale:
        raise ValueError("element is not self-adjoint")
    if alg.span_residual(x) > tol * scale * 10:
        raise ValueError("element does not lie in the algebra")
    w = np.linalg.eigvalsh(herm(x))
    return bool(w.min() >= -tol * scale)


def conjugated(alg: MatrixStarAlgebra, seed: int = 0) -> MatrixStarAlgebra:
    """The same algebra in a randomly rotated ambient representation."""
    rng = np.random.default_rng(seed)
    q = random_unitary(alg.ambient_dim, rng)
    qh = q.conj().T
    return MatrixStarAlgebra(
        alg.ambient_dim,
        [q @ b @ qh for b in alg.basis],
        generators=[q @ g @ qh for g in alg.generators] if alg.generators else None,
        tol=alg.tol,
    )
