"""Finite bundles of matrix-algebra fibers and partial actions on them.

A bundle assigns the full matrix algebra M_n to each base point.  A bundle
action lifts a partial action on the base to fibers through unitaries
U_{t,x}, one per admissible (t, x); fiber maps are always compared through
Ad (their effect on matrix units), never through raw matrix equality, since
U is only determined up to phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .actions import (
    CommuteReport,
    CommuteWitness,
    EnvelopingResult,
    PartialAction,
    Violation,
    commute,
    enveloping,
    restrict,
)
from .groups import FiniteGroup
from .linalg import ad_units_distance

DEFAULT_TOL = 1e-9


class FiniteBundle:
    """Assignment of a full matrix algebra M_{n_x} to every base point."""

    def __init__(self, dims: Mapping[str, int]):
        if not dims:
            raise ValueError("bundle needs at least one base point")
        self.points = tuple(sorted(dims))
        self.dims = {x: int(dims[x]) for x in self.points}
        for x, n in self.dims.items():
            if n < 1:
                raise ValueError(f"fiber dimension at {x!r} must be >= 1, got {n}")
        sizes = sorted(set(self.dims.values()))
        self.bucket_points = {n: tuple(x for x in self.points if self.dims[x] == n) for n in sizes}
        self.locate: dict[str, tuple[int, int]] = {}
        for n, pts in self.bucket_points.items():
            for row, x in enumerate(pts):
                self.locate[x] = (n, row)
        self.dim = sum(n * n for n in self.dims.values())
        self.hilbert_dim = sum(self.dims.values())
        self.hilbert_offset: dict[str, int] = {}
        off = 0
        for x in self.points:
            self.hilbert_offset[x] = off
            off += self.dims[x]
        flat_offset: dict[str, int] = {}
        off = 0
        for x in self.points:
            flat_offset[x] = off
            off += self.dims[x] ** 2
        self.flat_offset = flat_offset
        # per-bucket flat positions, so sections (de)vectorize in one gather per bucket
        self._flat_index: dict[int, np.ndarray] = {}
        for n, pts in self.bucket_points.items():
            idx = np.empty((len(pts), n, n), dtype=int)
            for row, x in enumerate(pts):
                idx[row] = flat_offset[x] + np.arange(n * n).reshape(n, n)
            self._flat_index[n] = idx

    def basis_labels(self) -> list[tuple[str, int, int]]:
        out = []
        for x in self.points:
            n = self.dims[x]
            for i in range(n):
                for j in range(n):
                    out.append((x, i, j))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteBundle) and self.dims == other.dims

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.dims.items())))

    def __repr__(self) -> str:
        return f"FiniteBundle({len(self.points)} points, dim {self.dim})"


class Section:
    """A section of a finite bundle: one fiber matrix per base point.

    Stored bucketed by fiber dimension so pointwise operations run as a few
    stacked numpy calls rather than per-point Python loops.
    """

    __slots__ = ("bundle", "blocks")

    def __init__(self, bundle: FiniteBundle, blocks: dict[int, np.ndarray]):
        self.bundle = bundle
        self.blocks = blocks

    @classmethod
    def zero(cls, bundle: FiniteBundle) -> "Section":
        return cls(
            bundle,
            {n: np.zeros((len(pts), n, n), dtype=complex) for n, pts in bundle.bucket_points.items()},
        )

    @classmethod
    def delta(cls, bundle: FiniteBundle, x: str, i: int = 0, j: int = 0, value: complex = 1.0) -> "Section":
        s = cls.zero(bundle)
        n, row = bundle.locate[x]
        s.blocks[n][row, i, j] = value
        return s

    @classmethod
    def indicator(cls, bundle: FiniteBundle, subset: Iterable[str]) -> "Section":
        """Identity matrix over each point of `subset`, zero elsewhere."""
        s = cls.zero(bundle)
        for x in subset:
            n, row = bundle.locate[x]
            s.blocks[n][row] = np.eye(n)
        return s

    @classmethod
    def one(cls, bundle: FiniteBundle) -> "Section":
        return cls.indicator(bundle, bundle.points)

    def get(self, x: str) -> np.ndarray:
        n, row = self.bundle.locate[x]
        return self.blocks[n][row]

    def put(self, x: str, m: np.ndarray) -> None:
        n, row = self.bundle.locate[x]
        self.blocks[n][row] = np.asarray(m, dtype=complex)

    def copy(self) -> "Section":
        return Section(self.bundle, {n: b.copy() for n, b in self.blocks.items()})

    def __add__(self, other: "Section") -> "Section":
        return Section(self.bundle, {n: self.blocks[n] + other.blocks[n] for n in self.blocks})

    def __sub__(self, other: "Section") -> "Section":
        return Section(self.bundle, {n: self.blocks[n] - other.blocks[n] for n in self.blocks})

    def __neg__(self) -> "Section":
        return Section(self.bundle, {n: -self.blocks[n] for n in self.blocks})

    def __mul__(self, other):
        if isinstance(other, Section):
            return Section(self.bundle, {n: self.blocks[n] @ other.blocks[n] for n in self.blocks})
        return Section(self.bundle, {n: other * self.blocks[n] for n in self.blocks})

    def __rmul__(self, scalar):
        return Section(self.bundle, {n: scalar * self.blocks[n] for n in self.blocks})

    def adjoint(self) -> "Section":
        return Section(self.bundle, {n: self.blocks[n].conj().swapaxes(1, 2) for n in self.blocks})

    def max_abs(self) -> float:
        return max((float(np.abs(b).max()) if b.size else 0.0) for b in self.blocks.values())

    def sup_norm(self) -> float:
        """Max operator norm over fibers."""
        worst = 0.0
        for b in self.blocks.values():
            if b.size:
                worst = max(worst, float(np.linalg.norm(b, ord=2, axis=(1, 2)).max()))
        return worst

    def flat(self) -> np.ndarray:
        out = np.empty(self.bundle.dim, dtype=complex)
        for n, idx in self.bundle._flat_index.items():
            out[idx] = self.blocks[n]
        return out

    @classmethod
    def from_flat(cls, bundle: FiniteBundle, v: np.ndarray) -> "Section":
        v = np.asarray(v, dtype=complex)
        return cls(bundle, {n: v[idx].copy() for n, idx in bundle._flat_index.items()})

    @classmethod
    def random(cls, bundle: FiniteBundle, rng: np.random.Generator) -> "Section":
        return cls(
            bundle,
            {
                n: rng.normal(size=(len(pts), n, n)) + 1j * rng.normal(size=(len(pts), n, n))
                for n, pts in bundle.bucket_points.items()
            },
        )

    def support(self, tol: float = DEFAULT_TOL) -> frozenset:
        out = set()
        for n, pts in self.bundle.bucket_points.items():
            block = self.blocks[n]
            for row, x in enumerate(pts):
                if np.abs(block[row]).max() > tol:
                    out.add(x)
        return frozenset(out)


class SectionAlgebra:
    """The *-algebra of all sections with pointwise operations."""

    def __init__(self, bundle: FiniteBundle):
        self.bundle = bundle
        self.dim = bundle.dim
        self.labels = bundle.basis_labels()

    def basis_section(self, k: int) -> Section:
        x, i, j = self.labels[k]
        return Section.delta(self.bundle, x, i, j)

    def basis(self) -> list[Section]:
        return [self.basis_section(k) for k in range(self.dim)]


def section_algebra(bundle: FiniteBundle) -> SectionAlgebra:
    return SectionAlgebra(bundle)


class _SectionMap:
    """Precompiled pointwise action of one group element on sections."""

    def __init__(self, bundle: FiniteBundle, moves: list[tuple[str, str, np.ndarray]]):
        self.bundle = bundle
        self.plan: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}
        per_bucket: dict[int, list[tuple[int, int, np.ndarray]]] = {}
        for dst, src, u in moves:
            n, dst_row = bundle.locate[dst]
            _, src_row = bundle.locate[src]
            per_bucket.setdefault(n, []).append((dst_row, src_row, u))
        for n, rows in per_bucket.items():
            dsts = np.array([r[0] for r in rows], dtype=int)
            srcs = np.array([r[1] for r in rows], dtype=int)
            us = np.stack([r[2] for r in rows])
            self.plan[n] = (dsts, srcs, us, us.conj().swapaxes(1, 2))

    def __call__(self, f: Section) -> Section:
        out = Section.zero(self.bundle)
        for n, (dsts, srcs, us, usH) in self.plan.items():
            out.blocks[n][dsts] = us @ f.blocks[n][srcs] @ usH
        return out


class BundleAction:
    """A partial action lifted to a bundle through per-point unitaries.

    unitaries[(t, x)] is defined exactly when x lies in X_{t^-1} and maps
    the fiber at x onto the fiber at alpha_t(x) by conjugation.  Missing
    entries default to the identity.
    """

    def __init__(
        self,
        base: PartialAction,
        bundle: FiniteBundle,
        unitaries: Mapping[tuple[int, str], np.ndarray] | None = None,
    ):
        if tuple(sorted(base.points)) != bundle.points:
            raise ValueError("bundle base points must match the action's point set")
        self.base = base
        self.bundle = bundle
        self.group = base.group
        given = dict(unitaries or {})
        self.unitaries: dict[tuple[int, str], np.ndarray] = {}
        for t in self.group.elements():
            for x in base.domains[self.group.inv(t)]:
                u = given.pop((t, x), None)
                if u is None:
                    u = np.eye(bundle.dims[x], dtype=complex)
                self.unitaries[(t, x)] = np.asarray(u, dtype=complex)
        if given:
            key = next(iter(given))
            raise ValueError(f"unitary given at {key} but that pair is outside the action domain")
        self._plans: dict[int, _SectionMap] = {}

    def unitary(self, t: int, x: str) -> np.ndarray:
        return self.unitaries[(t, x)]

    def section_map(self, t: int) -> _SectionMap:
        plan = self._plans.get(t)
        if plan is None:
            g = self.group
            moves = []
            for x in self.base.domains[t]:
                y = self.base.maps[g.inv(t)][x]  # y = alpha_{t^-1}(x)
                moves.append((x, y, self.unitaries[(t, y)]))
            plan = _SectionMap(self.bundle, moves)
            self._plans[t] = plan
        return plan

    def __repr__(self) -> str:
        return f"BundleAction({self.group.name} on {len(self.bundle.points)} points)"


def alpha_tilde(ba: BundleAction, t: int, f: Section) -> Section:
    """The induced map on sections: conjugate-and-translate, zero off X_t."""
    return ba.section_map(t)(f)


def line_bundle(base: PartialAction) -> BundleAction:
    """Trivial one-dimensional bundle over an action, all unitaries 1."""
    bundle = FiniteBundle({x: 1 for x in base.points})
    return BundleAction(base, bundle)


def trivial_bundle(
    base_action: PartialAction,
    n: int,
    gamma: Mapping[int, np.ndarray],
    tol: float = DEFAULT_TOL,
) -> BundleAction:
    """Constant-fiber bundle action with U_{t,x} = gamma_t.

    gamma must consist of unitaries forming a homomorphism up to Ad.
    """
    g = base_action.group
    mats = {t: np.asarray(gamma[t], dtype=complex) for t in g.elements()}
    for t, u in mats.items():
        if u.shape != (n, n):
            raise ValueError(f"gamma[{t}] has shape {u.shape}, expected ({n}, {n})")
        if np.abs(u.conj().T @ u - np.eye(n)).max() > tol:
            raise ValueError(f"gamma[{t}] is not unitary")
    for s in g.elements():
        for t in g.elements():
            if ad_units_distance(mats[g.mul(s, t)], mats[s] @ mats[t]) > tol:
                raise ValueError(f"gamma is not a homomorphism up to Ad at ({s}, {t})")
    bundle = FiniteBundle({x: n for x in base_action.points})
    unitaries = {
        (t, x): mats[t]
        for t in g.elements()
        for x in base_action.domains[g.inv(t)]
    }
    return BundleAction(base_action, bundle, unitaries)


@dataclass(frozen=True)
class BundleReport:
    valid: bool
    violations: tuple[Violation, ...]
    base_valid: bool


def validate_bundle_action(ba: BundleAction, tol: float = DEFAULT_TOL) -> BundleReport:
    """Check dimension compatibility, unitarity, Ad-composition and Ad-triviality at e."""
    from .actions import validate_action

    base_report = validate_action(ba.base)
    bad: list[Violation] = list(base_report.violations)
    g = ba.group
    e = g.identity
    for (t, x), u in ba.unitaries.items():
        y = ba.base.maps[t][x]
        n = ba.bundle.dims[x]
        if ba.bundle.dims[y] != n:
            bad.append(
                Violation("fiber-dims", (t, x), f"dim at {x!r} is {n} but at image {y!r} is {ba.bundle.dims[y]}")
            )
            continue
        if u.shape != (n, n):
            bad.append(Violation("fiber-shape", (t, x), f"unitary at ({t}, {x!r}) has shape {u.shape}"))
            continue
        res = float(np.abs(u.conj().T @ u - np.eye(n)).max())
        if res > tol:
            bad.append(Violation("unitarity", (t, x), f"U*U - I residual {res:.3e} at ({t}, {x!r})"))
    for x in ba.base.points:
        u = ba.unitaries[(e, x)]
        n = ba.bundle.dims[x]
        if ad_units_distance(u, np.eye(n, dtype=complex)) > tol:
            bad.append(Violation("identity-fiber", (e, x), f"U at identity is not Ad-trivial at {x!r}"))
    # composition on matrix units wherever the base composition axiom applies
    for t in g.elements():
        for x in ba.base.domains[g.inv(t)]:
            y = ba.base.maps[t][x]
            for s in g.elements():
                if y not in ba.base.domains[g.inv(s)]:
                    continue
                st = g.mul(s, t)
                lhs = ba.unitaries.get((st, x))
                if lhs is None:
                    bad.append(Violation("composition", (s, t, x), "composite unitary missing"))
                    continue
                res = ad_units_distance(lhs, ba.unitaries[(s, y)] @ ba.unitaries[(t, x)])
                if res > tol:
                    bad.append(
                        Violation("composition", (s, t, x), f"Ad-composition residual {res:.3e} at ({s}, {t}, {x!r})")
                    )
    return BundleReport(not bad, tuple(bad), base_report.valid)


def restrict_bundle_action(ba: BundleAction, subset: Iterable[str]) -> BundleAction:
    sub = frozenset(subset)
    base = restrict(ba.base, sub)
    dims = {x: ba.bundle.dims[x] for x in base.points}
    unitaries = {}
    g = base.group
    for t in g.elements():
        for x in base.domains[g.inv(t)]:
            unitaries[(t, x)] = ba.unitaries[(t, x)]
    return BundleAction(base, FiniteBundle(dims), unitaries)


def bundle_commute(a: BundleAction, b: BundleAction, tol: float = DEFAULT_TOL) -> CommuteReport:
    """Base actions commute and the fiber maps Ad-commute on common domains."""
    base = commute(a.base, b.base)
    if not base.ok:
        return base
    ga, gb = a.group, b.group
    for s in ga.elements():
        for t in gb.elements():
            for y in a.base.domains[s] & b.base.domains[gb.inv(t)]:
                x = a.base.maps[ga.inv(s)][y]
                bt_x = b.base.maps[t][x]
                lhs = a.unitaries[(s, bt_x)] @ b.unitaries[(t, x)]
                rhs = b.unitaries[(t, y)] @ a.unitaries[(s, x)]
                res = ad_units_distance(lhs, rhs)
                if res > tol:
                    return CommuteReport(
                        False,
                        CommuteWitness("fibers", s, t, (res,), (), point=x),
                    )
    return CommuteReport(True, None)


def product_bundle_action(a: BundleAction, b: BundleAction, tol: float = DEFAULT_TOL) -> BundleAction:
    """Bundle action of the product group: U_{(s,t),x} = U^a_{s, beta_t(x)} U^b_{t,x}."""
    from .actions import product_action

    com = bundle_commute(a, b, tol)
    if not com.ok:
        raise ValueError(f"bundle actions do not commute: witness {com.witness}")
    base = product_action(a.base, b.base)
    g = base.group
    ga, gb = a.group, b.group
    nk = gb.order
    unitaries = {}
    for s in ga.elements():
        for t in gb.elements():
            idx = s * nk + t
            for x in base.domains[g.inv(idx)]:
                z = b.base.maps[t][x]
                unitaries[(idx, x)] = a.unitaries[(s, z)] @ b.unitaries[(t, x)]
    return BundleAction(base, a.bundle, unitaries)


def slice_bundle_action(ba: BundleAction, factors: tuple[FiniteGroup, FiniteGroup], side: str) -> BundleAction:
    """Restrict an action of a product group to one factor (the other at identity)."""
    h, k = factors
    nk = k.order
    if side == "left":
        group, embed = h, lambda s: s * nk + k.identity
    elif side == "right":
        group, embed = k, lambda t: h.identity * nk + t
    else:
        raise ValueError("side must be 'left' or 'right'")
    domains = tuple(ba.base.domains[embed(t)] for t in group.elements())
    maps = tuple(dict(ba.base.maps[embed(t)]) for t in group.elements())
    base = PartialAction(group=group, points=ba.base.points, domains=domains, maps=maps)
    unitaries = {}
    for t in group.elements():
        for x in base.domains[group.inv(t)]:
            unitaries[(t, x)] = ba.unitaries[(embed(t), x)]
    return BundleAction(base, ba.bundle, unitaries)


class AlgebraPartialAction:
    """A partial action on a finite-dimensional section *-algebra.

    The algebra is realized by the sections of `realizing`; ideals are the
    sections vanishing off the realizing base domains.  When the carrier is
    an induced algebra, `to_realized`/`from_realized` transport sections
    through the orbit-bundle identification and `carrier_basis` spans the
    equivariant sections.
    """

    def __init__(
        self,
        realizing: BundleAction,
        label: str = "sections",
        to_realized: Callable[[Section], Section] | None = None,
        from_realized: Callable[[Section], Section] | None = None,
        carrier_basis: list[Section] | None = None,
        induced=None,
        actor: BundleAction | None = None,
    ):
        self.realizing = realizing
        self.group = realizing.group
        self.label = label
        self.to_realized = to_realized
        self.from_realized = from_realized
        self._carrier_basis = carrier_basis
        self.induced = induced
        self.actor = actor

    def ideal_support(self, t: int) -> frozenset:
        return self.realizing.base.domains[t]

    def ideal_dim(self, t: int) -> int:
        dims = self.realizing.bundle.dims
        return sum(dims[x] ** 2 for x in self.ideal_support(t))

    def dims(self) -> list[int]:
        return [self.ideal_dim(t) for t in self.group.elements()]

    @property
    def total_dim(self) -> int:
        return sum(self.dims())

    @property
    def carrier_dim(self) -> int:
        if self._carrier_basis is not None:
            return len(self._carrier_basis)
        return self.realizing.bundle.dim

    def carrier_basis(self) -> list[Section]:
        if self._carrier_basis is not None:
            return self._carrier_basis
        return SectionAlgebra(self.realizing.bundle).basis()

    def apply_realized(self, t: int, g: Section) -> Section:
        return alpha_tilde(self.realizing, t, g)

    def apply(self, t: int, f: Section) -> Section:
        g = self.to_realized(f) if self.to_realized else f
        h = self.apply_realized(t, g)
        return self.from_realized(h) if self.from_realized else h

    def realized_ideal_basis(self, t: int) -> list[Section]:
        bundle = self.realizing.bundle
        out = []
        for x in sorted(self.ideal_support(t)):
            n = bundle.dims[x]
            for i in range(n):
                for j in range(n):
                    out.append(Section.delta(bundle, x, i, j))
        return out

    def ideal_basis(self, t: int) -> list[Section]:
        basis = self.realized_ideal_basis(t)
        if self.from_realized is None:
            return basis
        return [self.from_realized(g) for g in basis]

    def __repr__(self) -> str:
        return f"AlgebraPartialAction({self.label}, {self.group.name}, dims {self.dims()})"


def induced_action_on_sections(ba: BundleAction) -> AlgebraPartialAction:
    """The partial action on the section algebra induced by a bundle action."""
    return AlgebraPartialAction(realizing=ba, label="sections")


@dataclass(frozen=True)
class AlgebraActionReport:
    valid: bool
    max_residual: float
    violations: tuple[Violation, ...]


def validate_algebra_action(apa: AlgebraPartialAction, tol: float = DEFAULT_TOL) -> AlgebraActionReport:
    """Check the partial-action axioms at the level of section ideals."""
    ba = apa.realizing
    g = apa.group
    e = g.identity
    bad: list[Violation] = []
    worst = 0.0

    def ideal_units(points: frozenset) -> list[Section]:
        out = []
        for x in sorted(points):
            n = ba.bundle.dims[x]
            for i in range(n):
                for j in range(n):
                    out.append(Section.delta(ba.bundle, x, i, j))
        return out

    full = frozenset(ba.base.points)
    if apa.ideal_support(e) != full:
        bad.append(Violation("identity-ideal", (e,), "ideal at identity must be the full algebra"))
    for f in ideal_units(full):
        res = (apa.apply_realized(e, f) - f).max_abs()
        worst = max(worst, res)
        if res > tol:
            bad.append(Violation("identity-iso", (e,), f"identity map residual {res:.3e}"))
            break
    for t in g.elements():
        src = apa.ideal_support(g.inv(t))
        for f in ideal_units(src):
            gsec = apa.apply_realized(t, f)
            if not gsec.support(tol) <= apa.ideal_support(t):
                bad.append(Violation("ideal-range", (t,), "image leaves the target ideal"))
                break
            res = (apa.apply_realized(g.inv(t), gsec) - f).max_abs()
            worst = max(worst, res)
            if res > tol:
                bad.append(Violation("inverse-iso", (t,), f"round-trip residual {res:.3e}"))
                break
    for s in g.elements():
        for t in g.elements():
            st = g.mul(s, t)
            mid = apa.ideal_support(t) & apa.ideal_support(g.inv(s))
            pts = {ba.base.maps[g.inv(t)][x] for x in mid}
            for f in ideal_units(frozenset(pts)):
                lhs = apa.apply_realized(s, apa.apply_realized(t, f))
                rhs = apa.apply_realized(st, f)
                res = (lhs - rhs).max_abs()
                worst = max(worst, res)
                if res > tol:
                    bad.append(
                        Violation("composition", (s, t), f"algebra composition residual {res:.3e}")
                    )
                    break
    return AlgebraActionReport(not bad, worst, tuple(bad))


@dataclass
class EnvelopedBundleAction:
    """Globalization of a bundle action.

    `action` is global over the enveloping base; `embed_fiber[x]` carries the
    fiber at x onto the model fiber at the embedded point so that fiber maps
    are intertwined up to Ad.
    """

    action: BundleAction
    base: EnvelopingResult
    embed_fiber: Mapping[str, np.ndarray]

    @property
    def embed(self) -> Mapping[str, str]:
        return self.base.embed


def enveloping_bundle(ba: BundleAction) -> EnvelopedBundleAction:
    """Globalize a bundle action; fiber data is transported along class anchors.

    Each enveloping point is anchored at its representative pair (t, x): its
    model fiber is the fiber at x, and the global unitaries are input
    unitaries read off through the anchors, so the composition law holds by
    construction whenever the input validates.
    """
    g = ba.group
    envres = enveloping(ba.base)
    dims = {name: ba.bundle.dims[pair[1]] for name, pair in envres.rep_pair.items()}
    env_bundle = FiniteBundle(dims)
    env_act = envres.env_action
    unitaries = {}
    for r in g.elements():
        for name in envres.env_points:
            t1, x1 = envres.rep_pair[name]
            target = env_act.maps[r][name]
            t2, x2 = envres.rep_pair[target]
            w = g.mul(g.inv(t2), g.mul(r, t1))
            u = ba.unitaries.get((w, x1))
            if u is None:
                raise AssertionError(
                    f"globalization anchor missing input unitary at ({w}, {x1!r}); input action is invalid"
                )
            unitaries[(r, name)] = u
    env_ba = BundleAction(env_act, env_bundle, unitaries)
    embed_fiber = {}
    for x in ba.base.points:
        name = envres.embed[x]
        t0, _ = envres.rep_pair[name]
        embed_fiber[x] = ba.unitaries[(g.inv(t0), x)]
    return EnvelopedBundleAction(action=env_ba, base=envres, embed_fiber=embed_fiber)


@dataclass(frozen=True)
class EnvRestrictionReport:
    sets_match: bool
    ad_residual: float


def env_restriction_report(ba: BundleAction, env: EnvelopedBundleAction) -> EnvRestrictionReport:
    """Round trip: restricting the globalization to the embedded base gives the input back.

    Set level is compared exactly through the embedding; fiber maps up to Ad.
    """
    g = ba.group
    embed = env.base.embed
    embedded = frozenset(embed[x] for x in ba.base.points)
    restricted = restrict(env.action.base, embedded)
    ok = True
    for t in g.elements():
        want = frozenset(embed[x] for x in ba.base.domains[t])
        if restricted.domains[t] != want:
            ok = False
            break
        for x, y in ba.base.maps[t].items():
            if restricted.maps[t].get(embed[x]) != embed[y]:
                ok = False
                break
    worst = 0.0
    for t in g.elements():
        for x in ba.base.domains[g.inv(t)]:
            y = ba.base.maps[t][x]
            lhs = env.action.unitaries[(t, embed[x])] @ env.embed_fiber[x]
            rhs = env.embed_fiber[y] @ ba.unitaries[(t, x)]
            worst = max(worst, ad_units_distance(lhs, rhs))
    return EnvRestrictionReport(sets_match=ok, ad_residual=worst)
