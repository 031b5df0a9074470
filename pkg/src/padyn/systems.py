"""System descriptions: JSON ingestion, canonical serialization, random instances.

A system file carries named groups, a point space with fiber dimensions,
and named bundle actions.  Serialization is canonical (sorted keys, fixed
%.12e float formatting, complex entries as [re, im] pairs) so fixtures and
reports diff cleanly; loading validates everything and reports field-precise
witnesses.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .actions import PartialAction, validate_action
from .bundles import BundleAction, FiniteBundle, validate_bundle_action
from .groups import FiniteGroup, cyclic_group, direct_product, validate_table
from .linalg import random_unitary

SYSTEM_FORMAT = "padyn-system/1"
DEFAULT_TOL = 1e-9


class InvalidSystem(ValueError):
    """A system description failed validation; witnesses name the fields."""

    def __init__(self, witnesses: list[str]):
        super().__init__("; ".join(witnesses))
        self.witnesses = witnesses


@dataclass
class SystemDescription:
    label: str
    groups: dict[str, FiniteGroup]
    space: tuple[str, ...]
    fibers: dict[str, int]
    actions: dict[str, BundleAction]
    metadata: dict = field(default_factory=dict)

    def bundle(self) -> FiniteBundle:
        return FiniteBundle(self.fibers)


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, %.12e floats."""

    def enc(o: Any) -> str:
        if isinstance(o, dict):
            items = sorted(o.items(), key=lambda kv: kv[0])
            return "{" + ",".join(f"{json.dumps(str(k))}:{enc(v)}" for k, v in items) + "}"
        if isinstance(o, (list, tuple)):
            return "[" + ",".join(enc(v) for v in o) + "]"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return "%.12e" % float(o)
        if isinstance(o, str):
            return json.dumps(o)
        if o is None:
            return "null"
        raise TypeError(f"cannot canonically serialize {type(o)!r}")

    return enc(obj)


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _pairs_to_matrix(data: Any, where: str, errors: list[str]) -> np.ndarray | None:
    try:
        rows = []
        for row in data:
            rows.append([complex(entry[0], entry[1]) for entry in row])
        m = np.array(rows, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            errors.append(f"{where}: matrix must be square, got shape {m.shape}")
            return None
        return m
    except (TypeError, ValueError, IndexError):
        errors.append(f"{where}: malformed complex matrix (expected rows of [re, im] pairs)")
        return None


def serialize_group(g: FiniteGroup) -> dict:
    return {"type": "table", "table": [list(row) for row in g.table]}


def _load_group(spec: Any, where: str, errors: list[str]) -> FiniteGroup | None:
    if not isinstance(spec, dict) or "type" not in spec:
        errors.append(f"{where}: group spec must be an object with a 'type' field")
        return None
    kind = spec["type"]
    if kind == "cyclic":
        n = spec.get("n")
        if not isinstance(n, int) or n < 1:
            errors.append(f"{where}: cyclic group needs a positive integer 'n'")
            return None
        return cyclic_group(n)
    if kind == "table":
        table = spec.get("table")
        report = validate_table(table or [])
        if not report.valid:
            errors.append(f"{where}: {report.violations[0].detail}")
            return None
        return FiniteGroup(table)
    if kind == "product":
        parts = spec.get("of")
        if not isinstance(parts, list) or len(parts) < 1:
            errors.append(f"{where}: product group needs a nonempty 'of' list")
            return None
        factors = []
        for i, sub in enumerate(parts):
            g = _load_group(sub, f"{where}.of[{i}]", errors)
            if g is None:
                return None
            factors.append(g)
        out = factors[0]
        for g in factors[1:]:
            out = direct_product(out, g)
        return out
    errors.append(f"{where}: unknown group type {kind!r}")
    return None


def serialize_action(ba: BundleAction, group_name: str) -> dict:
    g = ba.group
    e = g.identity
    domains = {}
    maps = {}
    unitaries: dict[str, dict] = {}
    for t in g.elements():
        if t == e:
            continue
        domains[str(t)] = sorted(ba.base.domains[t])
        maps[str(t)] = {x: y for x, y in sorted(ba.base.maps[t].items())}
    for (t, x), u in sorted(ba.unitaries.items()):
        if t == e:
            continue
        if np.array_equal(u, np.eye(u.shape[0], dtype=complex)):
            continue
        unitaries.setdefault(str(t), {})[x] = _matrix_to_pairs(u)
    out: dict[str, Any] = {"group": group_name, "domains": domains, "maps": maps}
    if unitaries:
        out["unitaries"] = unitaries
    return out


def serialize_system(sd: SystemDescription) -> dict:
    def name_of(ba: BundleAction) -> str:
        for name, g in sd.groups.items():
            if g == ba.group:
                return name
        raise ValueError("action group is not among the named groups of the system")

    return {
        "format": SYSTEM_FORMAT,
        "label": sd.label,
        "groups": {name: serialize_group(g) for name, g in sd.groups.items()},
        "space": list(sd.space),
        "fibers": dict(sd.fibers),
        "actions": {name: serialize_action(ba, name_of(ba)) for name, ba in sd.actions.items()},
        "metadata": sd.metadata,
    }


def system_digest(sd: SystemDescription) -> str:
    return hashlib.sha256(canonical_json(serialize_system(sd)).encode()).hexdigest()


def _load_action(
    name: str,
    spec: Any,
    groups: Mapping[str, FiniteGroup],
    space: tuple[str, ...],
    bundle: FiniteBundle,
    errors: list[str],
    tol: float,
) -> BundleAction | None:
    where = f"actions.{name}"
    if not isinstance(spec, dict):
        errors.append(f"{where}: action spec must be an object")
        return None
    gname = spec.get("group")
    if gname not in groups:
        errors.append(f"{where}.group: unknown group id {gname!r}")
        return None
    g = groups[gname]
    e = g.identity
    pts = frozenset(space)
    domains = [frozenset()] * g.order
    maps: list[dict] = [dict() for _ in range(g.order)]
    domains[e] = pts
    maps[e] = {x: x for x in space}
    raw_domains = spec.get("domains", {})
    raw_maps = spec.get("maps", {})
    for key, val in raw_domains.items():
        try:
            t = int(key)
        except ValueError:
            errors.append(f"{where}.domains.{key}: key must be a group element index")
            return None
        if not (0 <= t < g.order):
            errors.append(f"{where}.domains.{key}: element index out of range for {gname}")
            return None
        if t == e:
            continue
        unknown = [x for x in val if x not in pts]
        if unknown:
            errors.append(f"{where}.domains.{key}: unknown points {unknown}")
            return None
        domains[t] = frozenset(val)
    for key, val in raw_maps.items():
        try:
            t = int(key)
        except ValueError:
            errors.append(f"{where}.maps.{key}: key must be a group element index")
            return None
        if not (0 <= t < g.order) or t == e:
            continue
        maps[t] = dict(val)
    base = PartialAction(group=g, points=tuple(sorted(space)), domains=tuple(domains), maps=tuple(maps))
    report = validate_action(base)
    if not report.valid:
        for v in report.violations[:4]:
            errors.append(f"{where}: axiom {v.axiom} violated at {v.witness}: {v.detail}")
        return None
    unitaries = {}
    for key, perpoint in (spec.get("unitaries") or {}).items():
        try:
            t = int(key)
        except ValueError:
            errors.append(f"{where}.unitaries.{key}: key must be a group element index")
            return None
        if not (0 <= t < g.order):
            errors.append(f"{where}.unitaries.{key}: element index out of range for {gname}")
            return None
        for x, mat in perpoint.items():
            if x not in base.domains[g.inv(t)]:
                errors.append(
                    f"{where}.unitaries.{key}.{x}: point is outside the domain of the inverse element"
                )
                continue
            m = _pairs_to_matrix(mat, f"{where}.unitaries.{key}.{x}", errors)
            if m is not None:
                unitaries[(t, x)] = m
    if errors:
        return None
    try:
        ba = BundleAction(base, bundle, unitaries)
    except ValueError as exc:
        errors.append(f"{where}: {exc}")
        return None
    breport = validate_bundle_action(ba, tol)
    if not breport.valid:
        for v in breport.violations[:4]:
            errors.append(f"{where}: {v.axiom} violated at {v.witness}: {v.detail}")
        return None
    return ba


def load_system(data: Any, tol: float = DEFAULT_TOL) -> SystemDescription:
    """Parse and fully validate a system description (a dict or JSON text)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidSystem([f"parse error: {exc}"]) from exc
    errors: list[str] = []
    if not isinstance(data, dict):
        raise InvalidSystem(["top level must be an object"])
    fmt = data.get("format")
    if fmt != SYSTEM_FORMAT:
        errors.append(f"format: expected {SYSTEM_FORMAT!r}, got {fmt!r}")
    groups = {}
    for name, spec in (data.get("groups") or {}).items():
        g = _load_group(spec, f"groups.{name}", errors)
        if g is not None:
            groups[name] = g
    space = data.get("space") or []
    if not space:
        errors.append("space: must be a nonempty point list")
        raise InvalidSystem(errors)
    if len(set(space)) != len(space):
        dupes = sorted({x for x in space if space.count(x) > 1})
        raise InvalidSystem(errors + [f"space: duplicate points {dupes}"])
    space_t = tuple(sorted(str(x) for x in space))
    fibers_raw = data.get("fibers") or {}
    fibers = {}
    for x in space_t:
        n = fibers_raw.get(x, 1)
        if not isinstance(n, int) or n < 1:
            errors.append(f"fibers.{x}: fiber dimension must be a positive integer")
            n = 1
        fibers[x] = n
    for x in fibers_raw:
        if x not in fibers:
            errors.append(f"fibers.{x}: point not in space")
    if errors:
        raise InvalidSystem(errors)
    bundle = FiniteBundle(fibers)
    actions = {}
    for name, spec in (data.get("actions") or {}).items():
        ba = _load_action(name, spec, groups, space_t, bundle, errors, tol)
        if ba is not None:
            actions[name] = ba
    if errors:
        raise InvalidSystem(errors)
    return SystemDescription(
        label=str(data.get("label", "")),
        groups=groups,
        space=space_t,
        fibers=fibers,
        actions=actions,
        metadata=dict(data.get("metadata") or {}),
    )


def load_system_file(path: str, tol: float = DEFAULT_TOL) -> SystemDescription:
    with open(path, "r", encoding="utf-8") as fh:
        return load_system(fh.read(), tol)


def save_system(sd: SystemDescription, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(serialize_system(sd)))
        fh.write("\n")


# ---------------------------------------------------------------------------
# deterministic random instances


def _group_with_factors(order: int, use_klein: bool) -> tuple[FiniteGroup, list[int]]:
    if order == 4 and use_klein:
        return direct_product(cyclic_group(2), cyclic_group(2)), [2, 2]
    return cyclic_group(order), [order]


def _decode(factors: list[int], idx: int) -> list[int]:
    out = []
    for f in reversed(factors):
        out.append(idx % f)
        idx //= f
    return list(reversed(out))


def _character_phases(factors: list[int], exponents: list[int], order: int) -> list[complex]:
    """Value of the character with the given exponents on every group element."""
    out = []
    for a in range(order):
        digits = _decode(factors, a)
        angle = 2.0 * np.pi * sum(k * d / f for k, d, f in zip(exponents, digits, factors))
        out.append(complex(np.cos(angle), np.sin(angle)))
    return out


@dataclass
class RandomInstance:
    system: SystemDescription
    rejected: int
    exhausted: bool


def random_instance(
    seed: int,
    max_points: int = 8,
    max_group_order: int = 4,
    max_fiber_dim: int = 2,
    rejection_budget: int = 300,
) -> RandomInstance:
    """Deterministic commuting free pair: restrict a product-translation model.

    Two groups translate the first two coordinates of a product space
    (third coordinate is a free slot); fiber maps are gauged commuting
    character representations, so the global pair is exactly valid.  A random
    subset is then rejection-sampled until the restricted pair still
    commutes (freeness survives restriction automatically).
    """
    if min(max_points, max_group_order, max_fiber_dim) < 1:
        raise ValueError("all bounds must be >= 1")
    rng = np.random.default_rng(seed)
    n_h = int(rng.integers(1, max_group_order + 1))
    n_k = int(rng.integers(1, max_group_order + 1))
    h, h_factors = _group_with_factors(n_h, bool(rng.integers(0, 2)))
    k, k_factors = _group_with_factors(n_k, bool(rng.integers(0, 2)))
    slot_cap = max(1, min(2, (2 * max_points) // max(1, n_h * n_k)))
    slots = int(rng.integers(1, slot_cap + 1))

    names = {}
    for a in range(n_h):
        for b in range(n_k):
            for j in range(slots):
                names[(a, b, j)] = f"({a},{b},{j})"
    space = tuple(sorted(names.values()))
    coords = {v: key for key, v in names.items()}

    slot_dim = {j: int(rng.integers(1, max_fiber_dim + 1)) for j in range(slots)}
    fibers = {x: slot_dim[coords[x][2]] for x in space}
    bundle = FiniteBundle(fibers)

    gamma_h: dict[int, dict[int, np.ndarray]] = {}
    gamma_k: dict[int, dict[int, np.ndarray]] = {}
    gauge: dict[str, np.ndarray] = {}
    for j in range(slots):
        n = slot_dim[j]
        q = random_unitary(n, rng)
        exps_h = [[int(rng.integers(0, f)) for f in h_factors] for _ in range(n)]
        exps_k = [[int(rng.integers(0, f)) for f in k_factors] for _ in range(n)]
        ph_h = [_character_phases(h_factors, exps_h[d], h.order) for d in range(n)]
        ph_k = [_character_phases(k_factors, exps_k[d], k.order) for d in range(n)]
        gamma_h[j] = {
            s: q @ np.diag([ph_h[d][s] for d in range(n)]) @ q.conj().T for s in h.elements()
        }
        gamma_k[j] = {
            t: q @ np.diag([ph_k[d][t] for d in range(n)]) @ q.conj().T for t in k.elements()
        }
    for x in space:
        gauge[x] = random_unitary(fibers[x], rng)

    def act_h(s: int, x: str) -> str:
        a, b, j = coords[x]
        return names[(h.mul(s, a), b, j)]

    def act_k(t: int, x: str) -> str:
        a, b, j = coords[x]
        return names[(a, k.mul(t, b), j)]

    from .actions import commute, global_action, restrict
    from .bundles import restrict_bundle_action

    base_h = global_action(h, space, act_h)
    base_k = global_action(k, space, act_k)
    unit_h = {}
    unit_k = {}
    for s in h.elements():
        for x in space:
            j = coords[x][2]
            unit_h[(s, x)] = gauge[act_h(s, x)] @ gamma_h[j][s] @ gauge[x].conj().T
    for t in k.elements():
        for x in space:
            j = coords[x][2]
            unit_k[(t, x)] = gauge[act_k(t, x)] @ gamma_k[j][t] @ gauge[x].conj().T
    alpha_full = BundleAction(base_h, bundle, unit_h)
    beta_full = BundleAction(base_k, bundle, unit_k)

    rejected = 0
    chosen = None
    for _ in range(rejection_budget):
        size = int(rng.integers(1, min(max_points, len(space)) + 1))
        subset = sorted(rng.choice(len(space), size=size, replace=False))
        sub = frozenset(space[i] for i in subset)
        a_sub = restrict(base_h, sub)
        b_sub = restrict(base_k, sub)
        if commute(a_sub, b_sub).ok:
            chosen = sub
            break
        rejected += 1
    exhausted = chosen is None
    if chosen is None:
        chosen = frozenset(space)

    alpha = restrict_bundle_action(alpha_full, chosen)
    beta = restrict_bundle_action(beta_full, chosen)
    label = f"random-p{max_points}-g{max_group_order}-f{max_fiber_dim}-s{seed}"
    metadata = {
        "seed": seed,
        "bounds": [max_points, max_group_order, max_fiber_dim],
        "rejected": rejected,
    }
    if exhausted:
        metadata["notice"] = "rejection budget exhausted; emitted the unrestricted instance"
    system = SystemDescription(
        label=label,
        groups={"H": h, "K": k},
        space=tuple(sorted(chosen)),
        fibers={x: fibers[x] for x in sorted(chosen)},
        actions={"alpha": alpha, "beta": beta},
        metadata=metadata,
    )
    return RandomInstance(system=system, rejected=rejected, exhausted=exhausted)
