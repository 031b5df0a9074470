"""Finite groups as explicit multiplication tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

MAX_REPORTED_VIOLATIONS = 10


@dataclass(frozen=True)
class GroupViolation:
    """One failed group axiom together with a witness."""

    axiom: str  # "element-range" | "identity" | "associativity" | "inverse"
    witness: tuple
    detail: str


@dataclass(frozen=True)
class GroupReport:
    valid: bool
    violations: tuple[GroupViolation, ...]


def validate_table(table: Sequence[Sequence[int]]) -> GroupReport:
    """Scan a composition table for every violated group axiom."""
    n = len(table)
    bad: list[GroupViolation] = []
    if n == 0:
        return GroupReport(False, (GroupViolation("identity", (), "empty table"),))
    for a in range(n):
        if len(table[a]) != n:
            bad.append(GroupViolation("element-range", (a,), f"row {a} has length {len(table[a])}, expected {n}"))
            return GroupReport(False, tuple(bad))
        for b in range(n):
            v = table[a][b]
            if not (0 <= v < n):
                bad.append(GroupViolation("element-range", (a, b), f"table[{a}][{b}] = {v} out of range"))
    if bad:
        return GroupReport(False, tuple(bad[:MAX_REPORTED_VIOLATIONS]))

    identity = None
    for e in range(n):
        if all(table[e][a] == a and table[a][e] == a for a in range(n)):
            identity = e
            break
    if identity is None:
        bad.append(GroupViolation("identity", (), "no two-sided identity element"))

    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    bad.append(
                        GroupViolation(
                            "associativity",
                            (a, b, c),
                            f"(a*b)*c = {table[table[a][b]][c]} but a*(b*c) = {table[a][table[b][c]]} for (a,b,c)=({a},{b},{c})",
                        )
                    )
                    if len(bad) >= MAX_REPORTED_VIOLATIONS:
                        return GroupReport(False, tuple(bad))

    if identity is not None:
        for a in range(n):
            if not any(table[a][b] == identity and table[b][a] == identity for b in range(n)):
                bad.append(GroupViolation("inverse", (a,), f"element {a} has no two-sided inverse"))
                if len(bad) >= MAX_REPORTED_VIOLATIONS:
                    return GroupReport(False, tuple(bad))

    return GroupReport(not bad, tuple(bad))


class FiniteGroup:
    """A finite group on element indices 0..order-1 given by its full table."""

    def __init__(self, table: Sequence[Sequence[int]], name: str | None = None):
        self.table: tuple[tuple[int, ...], ...] = tuple(tuple(int(v) for v in row) for row in table)
        report = validate_table(self.table)
        if not report.valid:
            raise ValueError(f"not a group table: {report.violations[0].detail}")
        self.order = len(self.table)
        self.name = name or f"G{self.order}"
        self.identity = next(
            e for e in range(self.order) if all(self.table[e][a] == a for a in range(self.order))
        )
        inv = [0] * self.order
        for a in range(self.order):
            inv[a] = next(b for b in range(self.order) if self.table[a][b] == self.identity)
        self.inverse: tuple[int, ...] = tuple(inv)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def cyclic_group(n: int) -> FiniteGroup:
    """The cyclic group Z_n with addition mod n."""
    if n < 1:
        raise ValueError(f"cyclic group order must be >= 1, got {n}")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(table, name=f"Z{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Direct product with the fixed row-major encoding (a, b) -> a*|h| + b."""
    nh = h.order
    order = g.order * nh
    table = [[0] * order for _ in range(order)]
    for a1 in range(g.order):
        for b1 in range(nh):
            for a2 in range(g.order):
                for b2 in range(nh):
                    table[a1 * nh + b1][a2 * nh + b2] = g.table[a1][a2] * nh + h.table[b1][b2]
    return FiniteGroup(table, name=f"{g.name}x{h.name}")


def product_index(g: FiniteGroup, h: FiniteGroup, a: int, b: int) -> int:
    return a * h.order + b


def product_split(g: FiniteGroup, h: FiniteGroup, idx: int) -> tuple[int, int]:
    return divmod(idx, h.order)


def validate_group(g: FiniteGroup | Sequence[Sequence[int]]) -> GroupReport:
    """Validate a group or a raw table; reports every violated axiom."""
    table = g.table if isinstance(g, FiniteGroup) else g
    return validate_table(table)
