"""Partial actions of finite groups on finite point sets.

A partial action assigns to every group element t a subset X_t of the point
set and a bijection from X_{t^-1} onto X_t, with the identity acting fully
and compositions agreeing wherever both sides are defined.  Globalization,
orbit spaces, freeness, commutation, product and quotient actions all live
here at the set level; the bundle layer reuses these constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .groups import FiniteGroup, direct_product

MAX_REPORTED_VIOLATIONS = 12


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    detail: str


@dataclass(frozen=True)
class ActionReport:
    valid: bool
    is_global: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True, eq=True)
class PartialAction:
    """Partial action: domains[t] is X_t, maps[t] is the bijection X_{t^-1} -> X_t."""

    group: FiniteGroup
    points: tuple[str, ...]
    domains: tuple[frozenset, ...]
    maps: tuple[Mapping[str, str], ...]

    def domain(self, t: int) -> frozenset:
        return self.domains[t]

    def act(self, t: int, x: str) -> str:
        """Apply the partial map of t; raises KeyError off X_{t^-1}."""
        return self.maps[t][x]

    def defined(self, t: int, x: str) -> bool:
        return x in self.domains[self.group.inv(t)]

    def graph(self) -> list[tuple[int, str, str]]:
        return [(t, x, y) for t in self.group.elements() for x, y in sorted(self.maps[t].items())]


def global_action(group: FiniteGroup, points: Iterable[str], act) -> PartialAction:
    """Build a global action from a callable act(t, x) -> x'."""
    pts = tuple(sorted(points))
    full = frozenset(pts)
    domains = tuple(full for _ in group.elements())
    maps = tuple({x: act(t, x) for x in pts} for t in group.elements())
    for t in group.elements():
        if set(maps[t].values()) != set(pts):
            raise ValueError(f"act is not bijective for group element {t}")
    return PartialAction(group=group, points=pts, domains=domains, maps=maps)


def left_translation(group: FiniteGroup) -> PartialAction:
    """The group acting on itself by left translation, points named by index."""
    return global_action(group, (str(i) for i in group.elements()), lambda t, x: str(group.mul(t, int(x))))


def validate_action(pa: PartialAction) -> ActionReport:
    """Exhaustive scan of the partial-action axioms, with witnesses."""
    g = pa.group
    pts = set(pa.points)
    e = g.identity
    bad: list[Violation] = []

    def push(axiom: str, witness: tuple, detail: str) -> bool:
        bad.append(Violation(axiom, witness, detail))
        return len(bad) >= MAX_REPORTED_VIOLATIONS

    if len(pa.domains) != g.order or len(pa.maps) != g.order:
        push("structure", (), "domains/maps must have one entry per group element")
        return ActionReport(False, False, tuple(bad))

    for t in g.elements():
        if not pa.domains[t] <= pts:
            push("structure", (t,), f"X_{t} contains unknown points {sorted(pa.domains[t] - pts)}")
        src = pa.domains[g.inv(t)]
        if set(pa.maps[t].keys()) != set(src):
            push("structure", (t,), f"map of {t} must be defined exactly on X_{g.inv(t)}")
            continue
        values = list(pa.maps[t].values())
        if set(values) != set(pa.domains[t]) or len(values) != len(set(values)):
            push("bijection", (t,), f"map of {t} is not a bijection onto X_{t}")
    if bad:
        return ActionReport(False, False, tuple(bad))

    if pa.domains[e] != frozenset(pts):
        push("identity-domain", (e,), "X_e must be the whole point set")
    for x in pa.points:
        if pa.maps[e].get(x) != x:
            if push("identity-map", (e, x), f"identity must fix {x!r}"):
                return ActionReport(False, False, tuple(bad))

    for t in g.elements():
        ti = g.inv(t)
        for x, y in pa.maps[t].items():
            if pa.maps[ti].get(y) != x:
                if push("inverse-map", (t, x), f"map of {ti} must invert map of {t} at {x!r}"):
                    return ActionReport(False, False, tuple(bad))

    for t in g.elements():
        for s in g.elements():
            st = g.mul(s, t)
            for x, y in pa.maps[t].items():
                if y in pa.domains[g.inv(s)]:
                    if x not in pa.domains[g.inv(st)]:
                        if push(
                            "composition-domain",
                            (s, t, x),
                            f"x={x!r} reachable by {s} after {t} but missing from X_{{{g.inv(st)}}}",
                        ):
                            return ActionReport(False, False, tuple(bad))
                        continue
                    if pa.maps[st][x] != pa.maps[s][y]:
                        if push(
                            "composition-value",
                            (s, t, x),
                            f"map of {st} disagrees with composite at {x!r}",
                        ):
                            return ActionReport(False, False, tuple(bad))

    full = frozenset(pts)
    glob = all(pa.domains[t] == full for t in g.elements())
    return ActionReport(not bad, glob, tuple(bad))


def is_global(pa: PartialAction) -> bool:
    full = frozenset(pa.points)
    return all(pa.domains[t] == full for t in pa.group.elements())


def restrict(pa: PartialAction, subset: Iterable[str]) -> PartialAction:
    """Restrict to a nonempty subset: X'_t = S n alpha_t(S n X_{t^-1})."""
    sub = frozenset(subset)
    if not sub:
        raise ValueError("cannot restrict to the empty set")
    if not sub <= set(pa.points):
        raise ValueError(f"subset contains unknown points {sorted(sub - set(pa.points))}")
    g = pa.group
    domains = []
    maps = []
    for t in g.elements():
        src = sub & pa.domains[g.inv(t)]
        pairs = {x: pa.maps[t][x] for x in src if pa.maps[t][x] in sub}
        domains.append(frozenset(pairs.values()))
        maps.append(pairs)
    return PartialAction(group=g, points=tuple(sorted(sub)), domains=tuple(domains), maps=tuple(maps))


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


@dataclass(frozen=True)
class OrbitStructure:
    classes: tuple[frozenset, ...]
    class_of: Mapping[str, int]
    representative: tuple[str, ...]

    def rep_of(self, x: str) -> str:
        return self.representative[self.class_of[x]]


def orbits(pa: PartialAction) -> OrbitStructure:
    """Partition the points by the reachability closure of x ~ alpha_t(x)."""
    uf = _UnionFind(pa.points)
    for t in pa.group.elements():
        for x, y in pa.maps[t].items():
            uf.union(x, y)
    groups: dict[str, set] = {}
    for x in pa.points:
        groups.setdefault(uf.find(x), set()).add(x)
    classes = sorted((frozenset(c) for c in groups.values()), key=lambda c: min(c))
    class_of = {}
    reps = []
    for i, c in enumerate(classes):
        reps.append(min(c))
        for x in c:
            class_of[x] = i
    return OrbitStructure(tuple(classes), class_of, tuple(reps))


def stabilizer(pa: PartialAction, x: str) -> frozenset:
    """The set of group elements defined at x and fixing it."""
    g = pa.group
    return frozenset(t for t in g.elements() if x in pa.domains[g.inv(t)] and pa.maps[t][x] == x)


def is_free(pa: PartialAction) -> bool:
    e = pa.group.identity
    return all(stabilizer(pa, x) == frozenset({e}) for x in pa.points)


def has_closed_domain(pa: PartialAction) -> bool:
    """Constant true: in the finite discrete model every subset is clopen."""
    return True


def has_closed_graph(pa: PartialAction) -> bool:
    """Constant true: graphs of maps between finite discrete spaces are closed."""
    return True


def is_proper(pa: PartialAction) -> bool:
    """Constant true: preimages of (finite) compacta under finite maps are compact."""
    return True


@dataclass(frozen=True)
class CommuteWitness:
    kind: str  # "sets" | "maps" | "points"
    s: int
    t: int
    left: tuple
    right: tuple
    point: str | None = None


@dataclass(frozen=True)
class CommuteReport:
    ok: bool
    witness: CommuteWitness | None


def commute(a: PartialAction, b: PartialAction) -> CommuteReport:
    """Check the two commutation conditions for partial actions on one set.

    (i)  alpha_s(X^H_{s^-1} n X^K_t) = beta_t(X^K_{t^-1} n X^H_s) for all s, t;
    (ii) alpha_s beta_t = beta_t alpha_s on alpha_{s^-1}(X^H_s n X^K_{t^-1}).
    """
    if a.points != b.points:
        raise ValueError("commuting actions must share the point set")
    ga, gb = a.group, b.group
    for s in ga.elements():
        for t in gb.elements():
            left = {a.maps[s][x] for x in a.domains[ga.inv(s)] & b.domains[t]}
            right = {b.maps[t][x] for x in b.domains[gb.inv(t)] & a.domains[s]}
            if left != right:
                return CommuteReport(
                    False,
                    CommuteWitness("sets", s, t, tuple(sorted(left)), tuple(sorted(right))),
                )
    for s in ga.elements():
        for t in gb.elements():
            for y in a.domains[s] & b.domains[gb.inv(t)]:
                x = a.maps[ga.inv(s)][y]
                bt_x = b.maps[t].get(x)
                lhs = a.maps[s].get(bt_x) if bt_x is not None else None
                rhs = b.maps[t].get(y)
                if lhs is None or rhs is None:
                    return CommuteReport(
                        False, CommuteWitness("points", s, t, (lhs,), (rhs,), point=x)
                    )
                if lhs != rhs:
                    return CommuteReport(
                        False, CommuteWitness("maps", s, t, (lhs,), (rhs,), point=x)
                    )
    return CommuteReport(True, None)


def product_action(a: PartialAction, b: PartialAction) -> PartialAction:
    """The partial action of the product group, (s,t) acting by alpha_s beta_t."""
    com = commute(a, b)
    if not com.ok:
        raise ValueError(f"actions do not commute: witness {com.witness}")
    ga, gb = a.group, b.group
    g = direct_product(ga, gb)
    nk = gb.order
    domains: list[frozenset] = [frozenset()] * g.order
    for s in ga.elements():
        for t in gb.elements():
            domains[s * nk + t] = frozenset(
                a.maps[s][x] for x in a.domains[ga.inv(s)] & b.domains[t]
            )
    maps: list[dict] = [dict() for _ in range(g.order)]
    for s in ga.elements():
        for t in gb.elements():
            idx = s * nk + t
            src = domains[g.inv(idx)]
            mp = {}
            for x in src:
                y = b.maps[t].get(x)
                if y is None or y not in a.maps[s]:
                    raise AssertionError(
                        f"product action composite undefined at {(s, t, x)}; inputs are inconsistent"
                    )
                mp[x] = a.maps[s][y]
            maps[idx] = mp
    return PartialAction(group=g, points=a.points, domains=tuple(domains), maps=tuple(maps))


def quotient_action(pa: PartialAction, by: PartialAction) -> PartialAction:
    """Descend pa to the orbit space of a commuting action `by`.

    Quotient points are named by orbit representatives; the domain of s is
    the saturation of X_s and the map sends a class to the class of any
    admissible representative image (well-definedness is asserted).
    """
    com = commute(pa, by)
    if not com.ok:
        raise ValueError(f"actions do not commute: witness {com.witness}")
    orb = orbits(by)
    g = pa.group
    q_points = tuple(sorted(orb.representative))
    members = {orb.representative[i]: orb.classes[i] for i in range(len(orb.classes))}
    domains = []
    for t in g.elements():
        domains.append(frozenset(r for r in q_points if members[r] & pa.domains[t]))
    maps = []
    for t in g.elements():
        src = domains[g.inv(t)]
        mp = {}
        for r in src:
            targets = {orb.rep_of(pa.maps[t][x]) for x in members[r] & pa.domains[g.inv(t)]}
            if len(targets) != 1:
                raise AssertionError(
                    f"quotient map ill-defined at class {r!r}, element {t}: targets {sorted(targets)}"
                )
            mp[r] = targets.pop()
        maps.append(mp)
    return PartialAction(group=g, points=q_points, domains=tuple(domains), maps=tuple(maps))


def env_point_name(t: int, x: str) -> str:
    return f"{t}|{x}"


@dataclass(frozen=True)
class EnvelopingResult:
    """Globalization of a partial action.

    env_action is a global action on classes of (group element, point) pairs;
    embed identifies each original point with the class of (identity, point).
    """

    env_action: PartialAction
    embed: Mapping[str, str]
    env_points: tuple[str, ...]
    rep_pair: Mapping[str, tuple[int, str]]
    members: Mapping[str, tuple[tuple[int, str], ...]]

    @property
    def is_bijective(self) -> bool:
        return len(self.env_points) == len(self.embed)


def enveloping(pa: PartialAction) -> EnvelopingResult:
    """Compute the enveloping (global) action via union-find on pairs.

    Pairs (t, x) and (s, y) are glued when x lies in X_{t^-1 s} and the map
    of s^-1 t carries x to y; the group then acts by left translation on the
    first coordinate.  Class representatives are lexicographically least.
    """
    g = pa.group
    pidx = {x: i for i, x in enumerate(pa.points)}
    pairs = [(t, x) for t in g.elements() for x in pa.points]
    uf = _UnionFind(pairs)
    for t in g.elements():
        for u in g.elements():
            src = pa.domains[g.inv(u)]
            s = g.mul(t, g.inv(u))
            for x in src:
                uf.union((t, x), (s, pa.maps[u][x]))
    classes: dict[tuple[int, str], list[tuple[int, str]]] = {}
    for p in pairs:
        classes.setdefault(uf.find(p), []).append(p)
    rep_pair = {}
    members = {}
    name_of_pair = {}
    for group_members in classes.values():
        rep = min(group_members, key=lambda p: (p[0], pidx[p[1]]))
        name = env_point_name(*rep)
        rep_pair[name] = rep
        members[name] = tuple(sorted(group_members, key=lambda p: (p[0], pidx[p[1]])))
        for p in group_members:
            name_of_pair[p] = name
    env_points = tuple(sorted(rep_pair))
    full = frozenset(env_points)
    domains = tuple(full for _ in g.elements())
    maps = []
    for r in g.elements():
        mp = {}
        for name, (t, x) in rep_pair.items():
            mp[name] = name_of_pair[(g.mul(r, t), x)]
        maps.append(mp)
    env_action = PartialAction(group=g, points=env_points, domains=domains, maps=tuple(maps))
    embed = {x: name_of_pair[(g.identity, x)] for x in pa.points}
    return EnvelopingResult(
        env_action=env_action,
        embed=embed,
        env_points=env_points,
        rep_pair=rep_pair,
        members=members,
    )
