"""Crossed products of section algebras by finite groups, as matrix algebras.

A global system is realized by its regular representation on (sections'
Hilbert space) x (group coordinates).  A partial system is never represented
directly: its bundle action is globalized first, the global crossed product
is formed, and the partial crossed product is the corner cut out by the
projection onto sections supported in the embedded base.  The corner has
one basis element per (group element, matrix unit over the ideal support),
so its dimension is the sum of the ideal dimensions by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .actions import is_global
from .bundles import (
    AlgebraPartialAction,
    BundleAction,
    EnvelopedBundleAction,
    Section,
    alpha_tilde,
    enveloping_bundle,
    induced_action_on_sections,
)
from .linalg import SpanTracker, vec
from .star_algebra import (
    BlockStructure,
    MatrixStarAlgebra,
    WedderburnResult,
    morita_equivalent,
    wedderburn,
)

DEFAULT_TOL = 1e-9

CrossedElement = Mapping[int, Section]


class RegularRealization:
    """Regular representation of a global system on sections x group coordinates."""

    def __init__(self, ba: BundleAction):
        if not is_global(ba.base):
            raise ValueError("regular realization needs a global bundle action")
        self.ba = ba
        self.group = ba.group
        self.block = ba.bundle.hilbert_dim
        self.N = self.block * self.group.order

    def _place_diag(self, out: np.ndarray, r: int, c: int, section: Section) -> None:
        bundle = self.ba.bundle
        ro, co = r * self.block, c * self.block
        for x in bundle.points:
            off = bundle.hilbert_offset[x]
            n = bundle.dims[x]
            out[ro + off : ro + off + n, co + off : co + off + n] += section.get(x)

    def represent(self, elem: CrossedElement) -> np.ndarray:
        """Matrix of sum_t pi(a(t)) lambda_t; block (r, r') holds the r^-1-twist of a(r r'^-1)."""
        g = self.group
        out = np.zeros((self.N, self.N), dtype=complex)
        for t, f in elem.items():
            for r in g.elements():
                twisted = alpha_tilde(self.ba, g.inv(r), f)
                self._place_diag(out, r, g.mul(g.inv(t), r), twisted)
        return out

    def basis_matrix(self, t: int, x: str, i: int, j: int) -> np.ndarray:
        return self.represent({t: Section.delta(self.ba.bundle, x, i, j)})

    def translation(self, t: int) -> np.ndarray:
        return self.represent({t: Section.one(self.ba.bundle)})


def convolve(apa: AlgebraPartialAction, a: CrossedElement, b: CrossedElement) -> dict[int, Section]:
    """Twisted convolution (a * b)(t) = sum_s alpha_s(alpha_{s^-1}(a(s)) b(s^-1 t))."""
    g = apa.group
    bundle = apa.realizing.bundle
    out = {t: Section.zero(bundle) for t in g.elements()}
    for s, a_s in a.items():
        pulled = apa.apply_realized(g.inv(s), a_s)
        for t in g.elements():
            b_part = b.get(g.mul(g.inv(s), t))
            if b_part is None:
                continue
            out[t] = out[t] + apa.apply_realized(s, pulled * b_part)
    return out


def involute(apa: AlgebraPartialAction, a: CrossedElement) -> dict[int, Section]:
    """The involution a*(t) = alpha_t(a(t^-1)^*)."""
    g = apa.group
    bundle = apa.realizing.bundle
    out = {}
    for t in g.elements():
        f = a.get(g.inv(t))
        if f is None:
            out[t] = Section.zero(bundle)
        else:
            out[t] = apa.apply_realized(t, f.adjoint())
    return out


@dataclass
class CrossedProduct:
    """A crossed product with its faithful matrix realization and block profile."""

    apa: AlgebraPartialAction
    env: EnvelopedBundleAction | None
    realization: RegularRealization
    labels: list[tuple[int, str, int, int]]
    matrices: list[np.ndarray]
    algebra: MatrixStarAlgebra
    wedderburn: WedderburnResult

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def blocks(self) -> BlockStructure:
        return self.wedderburn.blocks

    def represent(self, elem: CrossedElement) -> np.ndarray:
        """Realize an element given over the (possibly partial) realizing bundle."""
        if self.env is None:
            return self.realization.represent(elem)
        pushed = {}
        env = self.env
        src = self.apa.realizing.bundle
        for t, f in elem.items():
            g = Section.zero(env.action.bundle)
            for x in src.points:
                u = env.embed_fiber[x]
                g.put(env.embed[x], u @ f.get(x) @ u.conj().T)
            pushed[t] = g
        return self.realization.represent(pushed)


def _corner_basis(
    apa: AlgebraPartialAction,
    realization: RegularRealization,
    embed: Mapping[str, str] | None,
) -> tuple[list[tuple[int, str, int, int]], list[np.ndarray]]:
    labels = []
    matrices = []
    dims = apa.realizing.bundle.dims
    for t in apa.group.elements():
        for x in sorted(apa.ideal_support(t)):
            target = embed[x] if embed is not None else x
            n = dims[x]
            for i in range(n):
                for j in range(n):
                    labels.append((t, x, i, j))
                    matrices.append(realization.basis_matrix(t, target, i, j))
    return labels, matrices


def _build(
    apa: AlgebraPartialAction,
    env: EnvelopedBundleAction | None,
    realization: RegularRealization,
    embed: Mapping[str, str] | None,
    tol: float,
    seed: int,
) -> CrossedProduct:
    labels, matrices = _corner_basis(apa, realization, embed)
    expected = apa.total_dim
    if len(labels) != expected:
        raise AssertionError(
            f"crossed product dimension {len(labels)} does not match ideal dimensions {expected}"
        )
    generators = matrices if len(matrices) < 64 else None
    alg = MatrixStarAlgebra(realization.N, matrices, generators=generators, tol=tol)
    if alg.dim != expected:
        raise AssertionError(
            f"realized crossed product has rank {alg.dim}, expected {expected}; realization is not faithful"
        )
    wd = wedderburn(alg, seed=seed, tol=tol)
    return CrossedProduct(
        apa=apa,
        env=env,
        realization=realization,
        labels=labels,
        matrices=matrices,
        algebra=alg,
        wedderburn=wd,
    )


def global_crossed_product(
    apa: AlgebraPartialAction, tol: float = DEFAULT_TOL, seed: int = 0
) -> CrossedProduct:
    """Regular-representation crossed product of a global system."""
    if not is_global(apa.realizing.base):
        raise ValueError("global crossed product requires a global system")
    realization = RegularRealization(apa.realizing)
    return _build(apa, None, realization, None, tol, seed)


def partial_crossed_product(
    apa: AlgebraPartialAction, tol: float = DEFAULT_TOL, seed: int = 0
) -> CrossedProduct:
    """Crossed product of a partial system, as a corner of its globalization."""
    if is_global(apa.realizing.base):
        return global_crossed_product(apa, tol=tol, seed=seed)
    env = enveloping_bundle(apa.realizing)
    realization = RegularRealization(env.action)
    return _build(apa, env, realization, env.embed, tol, seed)


def section_algebra_realization(bundle, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """The section algebra as block-diagonal matrices on the fiber Hilbert sum."""
    n = bundle.hilbert_dim
    mats = []
    for (x, i, j) in bundle.basis_labels():
        off = bundle.hilbert_offset[x]
        m = np.zeros((n, n), dtype=complex)
        m[off + i, off + j] = 1.0
        mats.append(m)
    return MatrixStarAlgebra(n, mats, generators=mats, tol=tol)


def _group_generators(realization: RegularRealization) -> list[np.ndarray]:
    """Generators of the full global crossed product: fiber units at e plus translations."""
    ba = realization.ba
    gens = []
    for x in ba.bundle.points:
        n = ba.bundle.dims[x]
        for i in range(n):
            for j in range(n):
                gens.append(realization.basis_matrix(ba.group.identity, x, i, j))
    for t in ba.group.elements():
        gens.append(realization.translation(t))
    return gens


def _embedded_projection(realization: RegularRealization, embedded: frozenset) -> np.ndarray:
    """The diagonal projection onto coordinates over the embedded base, all translates."""
    ba = realization.ba
    g = ba.group
    out = np.zeros((realization.N, realization.N), dtype=complex)
    for r in g.elements():
        pulled = {ba.base.maps[g.inv(r)][x] for x in embedded}
        ind = Section.indicator(ba.bundle, pulled)
        realization._place_diag(out, r, r, ind)
    return out


@dataclass(frozen=True)
class EnvelopingMoritaReport:
    corner_dim: int
    corner_dim_expected: int
    global_dim: int
    corner_blocks: BlockStructure
    global_blocks: BlockStructure
    fullness_rank: int
    fullness_ok: bool
    hereditary_residual: float
    dims_ok: bool
    morita_ok: bool

    @property
    def ok(self) -> bool:
        return self.dims_ok and self.fullness_ok and self.morita_ok


def verify_enveloping_morita(
    ba: BundleAction, tol: float = DEFAULT_TOL, seed: int = 0
) -> EnvelopingMoritaReport:
    """Check that the partial crossed product sits as a full hereditary corner.

    Builds the globalized crossed product W, the corner cut by the embedded
    base projection, verifies the corner dimension, that the two-sided ideal
    generated by the corner is all of W (fullness, by rank), that compressing
    W into the corner stays inside it (hereditarity), and the Morita verdict.
    """
    apa = induced_action_on_sections(ba)
    cp = partial_crossed_product(apa, tol=tol, seed=seed)
    if cp.env is None:
        # already global: the corner is everything
        return EnvelopingMoritaReport(
            corner_dim=cp.dim,
            corner_dim_expected=apa.total_dim,
            global_dim=cp.dim,
            corner_blocks=cp.blocks,
            global_blocks=cp.blocks,
            fullness_rank=cp.dim,
            fullness_ok=True,
            hereditary_residual=0.0,
            dims_ok=True,
            morita_ok=True,
        )
    env = cp.env
    apa_w = induced_action_on_sections(env.action)
    w = global_crossed_product(apa_w, tol=tol, seed=seed)
    embedded = frozenset(env.embed[x] for x in ba.base.points)
    p = _embedded_projection(cp.realization, embedded)

    # hereditarity: compressing random elements of W lands in the corner span
    rng = np.random.default_rng(seed)
    hered = 0.0
    for _ in range(6):
        coeff = rng.normal(size=w.dim) + 1j * rng.normal(size=w.dim)
        wmat = np.tensordot(coeff, np.stack(w.matrices), axes=1)
        hered = max(hered, cp.algebra.span_residual(p @ wmat @ p) / max(1.0, float(np.abs(wmat).max())))

    # fullness: two-sided ideal generated by the corner inside W
    gens = _group_generators(w.realization)
    tracker = SpanTracker(w.realization.N ** 2)
    frontier = list(cp.matrices)
    for m in frontier:
        tracker.add(vec(m))
    while frontier and tracker.dim < w.dim:
        fresh = []
        for m in frontier:
            for gmat in gens:
                for prod in (gmat @ m, m @ gmat):
                    if tracker.add(vec(prod)):
                        fresh.append(prod)
        frontier = fresh
    fullness_rank = tracker.dim
    dims_ok = cp.dim == apa.total_dim
    morita_ok = morita_equivalent(cp.blocks, w.blocks)
    return EnvelopingMoritaReport(
        corner_dim=cp.dim,
        corner_dim_expected=apa.total_dim,
        global_dim=w.dim,
        corner_blocks=cp.blocks,
        global_blocks=w.blocks,
        fullness_rank=fullness_rank,
        fullness_ok=fullness_rank == w.dim,
        hereditary_residual=hered,
        dims_ok=dims_ok,
        morita_ok=morita_ok,
    )
