"""Orbit bundles, induced algebras and actions descended to orbit spaces.

For a free action the fiber over an orbit is identified with the fiber at
the orbit representative through the unique transfer element t(x, y); the
induced algebra of equivariant sections is then isomorphic to the sections
of the orbit bundle, and a second commuting action descends to the orbit
bundle along the same identifications.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .actions import OrbitStructure, is_free, orbits, quotient_action
from .bundles import (
    AlgebraPartialAction,
    BundleAction,
    FiniteBundle,
    Section,
    bundle_commute,
)
from .linalg import ad_units_distance, nullspace

DEFAULT_TOL = 1e-9


@dataclass
class OrbitBundle:
    """Bundle over the orbit space of a free action, fibers at representatives."""

    source: BundleAction
    orbits: OrbitStructure
    bundle: FiniteBundle
    transfer_elem: Mapping[tuple[str, str], int]
    transfer_unitary: Mapping[tuple[str, str], np.ndarray]

    def rep_of(self, x: str) -> str:
        return self.orbits.rep_of(x)

    def transport(self, x: str, y: str) -> np.ndarray:
        """Unitary implementing the unique fiber map from x to y in one orbit."""
        return self.transfer_unitary[(x, y)]


def orbit_bundle(ba: BundleAction) -> OrbitBundle:
    """Construct the orbit bundle of a free bundle action."""
    base = ba.base
    if not is_free(base):
        raise ValueError("orbit bundle requires a free base action")
    g = base.group
    orb = orbits(base)
    dims = {}
    for rep in orb.representative:
        dims[rep] = ba.bundle.dims[rep]
    transfer_elem: dict[tuple[str, str], int] = {}
    transfer_unitary: dict[tuple[str, str], np.ndarray] = {}
    for cls in orb.classes:
        for x in cls:
            for y in cls:
                ts = [
                    t
                    for t in g.elements()
                    if x in base.domains[g.inv(t)] and base.maps[t][x] == y
                ]
                if len(ts) != 1:
                    raise AssertionError(
                        f"transfer element not unique for ({x!r}, {y!r}); freeness should force exactly one"
                    )
                t = ts[0]
                transfer_elem[(x, y)] = t
                transfer_unitary[(x, y)] = ba.unitaries[(t, x)]
    return OrbitBundle(
        source=ba,
        orbits=orb,
        bundle=FiniteBundle(dims),
        transfer_elem=transfer_elem,
        transfer_unitary=transfer_unitary,
    )


@dataclass
class InducedAlgebra:
    """Equivariant sections of a bundle action, with orbit-bundle projection."""

    action: BundleAction
    orbit: OrbitBundle
    basis: list[Section]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def project(self, f: Section) -> Section:
        """Evaluate at orbit representatives, landing in the orbit bundle."""
        out = Section.zero(self.orbit.bundle)
        for rep in self.orbit.bundle.points:
            out.put(rep, f.get(rep))
        return out

    def lift(self, q: Section) -> Section:
        """Transport orbit-bundle values along transfers to an equivariant section."""
        out = Section.zero(self.action.bundle)
        for x in self.action.bundle.points:
            rep = self.orbit.rep_of(x)
            u = self.orbit.transport(rep, x)
            out.put(x, u @ q.get(rep) @ u.conj().T)
        return out

    def equivariance_residual(self, f: Section) -> float:
        worst = 0.0
        ba = self.action
        g = ba.group
        for t in g.elements():
            for x in ba.base.domains[g.inv(t)]:
                u = ba.unitaries[(t, x)]
                y = ba.base.maps[t][x]
                worst = max(worst, float(np.abs(f.get(y) - u @ f.get(x) @ u.conj().T).max()))
        return worst


def induced_algebra(ba: BundleAction, tol: float = DEFAULT_TOL) -> InducedAlgebra:
    """Solve the equivariance constraints f(t.x) = Ad(U_{t,x}) f(x).

    The solution space is computed as a numerical null space; its dimension
    equals the sum of squared fiber dimensions over orbit representatives.
    """
    if not is_free(ba.base):
        raise ValueError("induced algebra requires a free base action")
    orb = orbit_bundle(ba)
    bundle = ba.bundle
    g = ba.group
    offsets = {}
    off = 0
    for x in bundle.points:
        offsets[x] = off
        off += bundle.dims[x] ** 2
    rows = []
    for t in g.elements():
        if t == g.identity:
            continue
        for x in ba.base.domains[g.inv(t)]:
            y = ba.base.maps[t][x]
            u = ba.unitaries[(t, x)]
            n = bundle.dims[x]
            block = np.zeros((n * n, bundle.dim), dtype=complex)
            block[:, offsets[y] : offsets[y] + n * n] = np.eye(n * n)
            block[:, offsets[x] : offsets[x] + n * n] -= np.kron(u, u.conj())
            rows.append(block)
    if rows:
        constraint = np.vstack(rows)
        basis_vecs = nullspace(constraint)
    else:
        basis_vecs = np.eye(bundle.dim, dtype=complex)
    basis = [Section.from_flat(bundle, basis_vecs[:, k]) for k in range(basis_vecs.shape[1])]
    expected = sum(bundle.dims[rep] ** 2 for rep in orb.bundle.points)
    if len(basis) != expected:
        raise AssertionError(
            f"equivariant solution space has dimension {len(basis)}, expected {expected}"
        )
    return InducedAlgebra(action=ba, orbit=orb, basis=basis)


@dataclass(frozen=True)
class IndIsoReport:
    multiplicative_residual: float
    adjoint_residual: float
    roundtrip_residual: float
    isometry_residual: float
    bijective: bool


def ind_iso(ia: InducedAlgebra, seed: int = 0) -> IndIsoReport:
    """Verify that projection onto the orbit bundle is a bijective *-isomorphism."""
    rng = np.random.default_rng(seed)
    mult = adj = rt = iso = 0.0
    for _ in range(4):
        cf = rng.normal(size=ia.dim) + 1j * rng.normal(size=ia.dim)
        cg = rng.normal(size=ia.dim) + 1j * rng.normal(size=ia.dim)
        f = _combine(ia.basis, cf)
        g = _combine(ia.basis, cg)
        mult = max(mult, (ia.project(f * g) - ia.project(f) * ia.project(g)).max_abs())
        adj = max(adj, (ia.project(f.adjoint()) - ia.project(f).adjoint()).max_abs())
        rt = max(rt, (ia.lift(ia.project(f)) - f).max_abs())
        iso = max(iso, abs(f.sup_norm() - ia.project(f).sup_norm()))
    bij = ia.dim == ia.orbit.bundle.dim
    return IndIsoReport(mult, adj, rt, iso, bij)


def _combine(basis: list[Section], coeffs: np.ndarray) -> Section:
    out = Section.zero(basis[0].bundle)
    for c, b in zip(coeffs, basis):
        out = out + c * b
    return out


def quotient_bundle_action(
    acting: BundleAction, by: BundleAction, tol: float = DEFAULT_TOL
) -> BundleAction:
    """Descend `acting` to the orbit bundle of the free commuting action `by`.

    The unitary at (t, class) transports the representative fiber to an
    admissible point, applies the acting unitary there, and transports back;
    all admissible choices must agree up to Ad.
    """
    com = bundle_commute(acting, by, tol)
    if not com.ok:
        raise ValueError(f"bundle actions do not commute: witness {com.witness}")
    orb = orbit_bundle(by)
    q_base = quotient_action(acting.base, by.base)
    g = acting.group
    members = {
        orb.orbits.representative[i]: orb.orbits.classes[i]
        for i in range(len(orb.orbits.classes))
    }
    unitaries = {}
    for t in g.elements():
        for rep in q_base.domains[g.inv(t)]:
            candidates = sorted(members[rep] & acting.base.domains[g.inv(t)])
            built = None
            for x in candidates:
                y = acting.base.maps[t][x]
                rep2 = orb.rep_of(y)
                u = (
                    orb.transport(y, rep2)
                    @ acting.unitaries[(t, x)]
                    @ orb.transport(rep, x)
                )
                if built is None:
                    built = u
                else:
                    res = ad_units_distance(built, u)
                    if res > tol:
                        raise AssertionError(
                            f"quotient fiber map ill-defined at ({t}, {rep!r}): Ad residual {res:.3e}"
                        )
            unitaries[(t, rep)] = built
    return BundleAction(q_base, orb.bundle, unitaries)


def induced_algebra_action(
    free_action: BundleAction, actor: BundleAction, tol: float = DEFAULT_TOL
) -> AlgebraPartialAction:
    """The actor descended to the induced algebra of a free commuting action.

    Realized through the orbit bundle: quotient the actor to the orbit
    bundle, act there on sections, and pull back through the induced-algebra
    identification.
    """
    if not is_free(free_action.base):
        raise ValueError("induced algebra action requires the first action to be free")
    com = bundle_commute(free_action, actor, tol)
    if not com.ok:
        raise ValueError(f"bundle actions do not commute: witness {com.witness}")
    ia = induced_algebra(free_action, tol)
    mu = quotient_bundle_action(actor, free_action, tol)
    return AlgebraPartialAction(
        realizing=mu,
        label=f"Ind({free_action.group.name})x{actor.group.name}",
        to_realized=ia.project,
        from_realized=ia.lift,
        carrier_basis=ia.basis,
        induced=ia,
        actor=actor,
    )
