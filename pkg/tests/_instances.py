"""Shared worked instances: the three desk examples used across the suite.

E1: Z_4 translation on four points restricted to three, line bundle.
E2: Z_2 x Z_2 coordinate translations (global, free, commuting), line bundle.
E3: the E2 pair restricted to the two points with second coordinate zero.
"""

from __future__ import annotations

import numpy as np

from padyn.actions import PartialAction, global_action, left_translation, restrict
from padyn.bundles import BundleAction, line_bundle, restrict_bundle_action
from padyn.groups import cyclic_group
from padyn.systems import SystemDescription


def pt(a: int, b: int) -> str:
    return f"({a},{b})"


KLEIN_POINTS = tuple(sorted(pt(a, b) for a in range(2) for b in range(2)))


def e1_base() -> PartialAction:
    g = cyclic_group(4)
    return restrict(left_translation(g), {"0", "1", "2"})


def e1_bundle() -> BundleAction:
    return line_bundle(e1_base())


def _coords(x: str) -> tuple[int, int]:
    a, b = x.strip("()").split(",")
    return int(a), int(b)


def e2_bases() -> tuple[PartialAction, PartialAction]:
    z2 = cyclic_group(2)

    def act_h(t: int, x: str) -> str:
        a, b = _coords(x)
        return pt((a + t) % 2, b)

    def act_k(t: int, x: str) -> str:
        a, b = _coords(x)
        return pt(a, (b + t) % 2)

    return (
        global_action(z2, KLEIN_POINTS, act_h),
        global_action(z2, KLEIN_POINTS, act_k),
    )


def e2_bundles() -> tuple[BundleAction, BundleAction]:
    a, b = e2_bases()
    return line_bundle(a), line_bundle(b)


def e3_bundles() -> tuple[BundleAction, BundleAction]:
    a, b = e2_bundles()
    keep = {pt(0, 0), pt(1, 0)}
    return restrict_bundle_action(a, keep), restrict_bundle_action(b, keep)


def e1_system() -> SystemDescription:
    ba = e1_bundle()
    return SystemDescription(
        label="e1",
        groups={"H": ba.group},
        space=ba.base.points,
        fibers=dict(ba.bundle.dims),
        actions={"alpha": ba},
        metadata={},
    )


def e2_system() -> SystemDescription:
    a, b = e2_bundles()
    return SystemDescription(
        label="e2",
        groups={"H": a.group, "K": b.group},
        space=a.base.points,
        fibers=dict(a.bundle.dims),
        actions={"alpha": a, "beta": b},
        metadata={},
    )


def e3_system() -> SystemDescription:
    a, b = e3_bundles()
    return SystemDescription(
        label="e3",
        groups={"H": a.group, "K": b.group},
        space=a.base.points,
        fibers=dict(a.bundle.dims),
        actions={"alpha": a, "beta": b},
        metadata={},
    )


def flip_bundle(base: PartialAction) -> BundleAction:
    """Two-dimensional trivial bundle with the order-two flip as fiber map."""
    from padyn.bundles import trivial_bundle

    flip = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    gamma = {t: (np.eye(2, dtype=complex) if t == base.group.identity else flip) for t in base.group.elements()}
    # only valid when every non-identity element has order two
    return trivial_bundle(base, 2, gamma)
