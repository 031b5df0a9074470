import numpy as np
import pytest

from _instances import e2_bundles, e3_bundles, pt

from padyn.actions import global_action
from padyn.bundles import BundleAction, FiniteBundle, Section, alpha_tilde
from padyn.groups import cyclic_group
from padyn.imprimitivity import (
    AXIOM_KEYS,
    build_bimodule,
    symmetric_imprimitivity,
    verify_bimodule_axioms,
)


def inner_e_hand_oracle(zb, f, g, s):
    """Direct double-sum evaluation of the E-valued inner product at s."""
    beta, alpha = zb.beta, zb.alpha
    bundle = alpha.bundle
    total = Section.zero(bundle)
    shifted = alpha_tilde(alpha, s, g.adjoint())
    prod = f * shifted
    for t in beta.group.elements():
        total = total + alpha_tilde(beta, t, prod)
    return total


def test_build_bimodule_dimensions_e2():
    a, b = e2_bundles()
    zb = build_bimodule(a, b)
    assert zb.z_dim == 4
    assert zb.E.dim == 4
    assert zb.F.dim == 4


def test_build_bimodule_requires_global():
    a3, b3 = e3_bundles()
    with pytest.raises(ValueError):
        build_bimodule(a3, b3)


def test_single_point_trivial_groups_scalar_ops():
    z1 = cyclic_group(1)
    base = global_action(z1, ("p",), lambda t, x: x)
    ba = BundleAction(base, FiniteBundle({"p": 1}))
    zb = build_bimodule(ba, ba)
    f = Section.delta(ba.bundle, "p", value=2.0)
    g = Section.delta(ba.bundle, "p", value=3.0 + 1j)
    b_elem = {0: Section.delta(ba.bundle, "p", value=1.5)}
    assert abs(zb.left_action(b_elem, f).get("p")[0, 0] - 3.0) < 1e-12
    assert abs(zb.right_action(f, b_elem).get("p")[0, 0] - 3.0) < 1e-12
    assert abs(zb.inner_E(f, g)[0].get("p")[0, 0] - 2.0 * (3.0 - 1j)) < 1e-12
    assert abs(zb.inner_F(f, g)[0].get("p")[0, 0] - 2.0 * (3.0 + 1j)) < 1e-12


def test_inner_E_delta_hand_enumeration():
    a, b = e2_bundles()
    zb = build_bimodule(a, b)
    x = pt(0, 0)
    dx = Section.delta(a.bundle, x)
    got = zb.inner_E(dx, dx)
    for s in a.group.elements():
        oracle = inner_e_hand_oracle(zb, dx, dx, s)
        assert (got[s] - oracle).max_abs() < 1e-12
    # s = e: summing the K-translates of |delta_x|^2 puts 1 on the K-orbit of x
    val = got[0]
    assert abs(val.get(pt(0, 0))[0, 0] - 1.0) < 1e-12
    assert abs(val.get(pt(0, 1))[0, 0] - 1.0) < 1e-12
    assert abs(val.get(pt(1, 0))[0, 0]) < 1e-12
    # s = 1: delta_x * translate(delta_x) vanishes since the translate moves x
    assert got[1].max_abs() < 1e-12


def test_zero_section_gives_zero_inner_products():
    a, b = e2_bundles()
    zb = build_bimodule(a, b)
    zero = Section.zero(a.bundle)
    assert all(sec.max_abs() == 0.0 for sec in zb.inner_E(zero, zero).values())
    assert all(sec.max_abs() == 0.0 for sec in zb.inner_F(zero, zero).values())


def test_verify_axioms_e2_exhaustive():
    a, b = e2_bundles()
    zb = build_bimodule(a, b)
    report = verify_bimodule_axioms(zb)
    assert report.exhaustive
    assert set(report.residuals) == set(AXIOM_KEYS)
    assert report.max_residual <= 1e-8
    assert report.positivity_E and report.positivity_F
    assert report.fullness_rank_E == report.dim_E == 4
    assert report.fullness_rank_F == report.dim_F == 4


def test_verify_axioms_random_instance():
    from padyn.systems import random_instance
    from padyn.bundles import enveloping_bundle, product_bundle_action, slice_bundle_action

    inst = random_instance(13, 8, 3, 2)
    sd = inst.system
    alpha, beta = sd.actions["alpha"], sd.actions["beta"]
    env = enveloping_bundle(product_bundle_action(alpha, beta))
    sigma = slice_bundle_action(env.action, (alpha.group, beta.group), "left")
    tau = slice_bundle_action(env.action, (alpha.group, beta.group), "right")
    zb = build_bimodule(sigma, tau)
    report = verify_bimodule_axioms(zb, seed=13)
    assert report.max_residual <= 1e-7
    assert report.positivity_E and report.positivity_F
    assert report.fullness_rank_E == report.dim_E
    assert report.fullness_rank_F == report.dim_F


def test_inner_product_norm_identity():
    a, b = e2_bundles()
    zb = build_bimodule(a, b)
    rng = np.random.default_rng(21)
    for _ in range(4):
        f = Section.random(a.bundle, rng)
        me = zb.E.represent(zb.inner_E(f, f))
        mf = zb.F.represent(zb.inner_F(f, f))
        ne = np.linalg.norm(me, ord=2)
        nf = np.linalg.norm(mf, ord=2)
        assert abs(ne - nf) <= 1e-7 * max(1.0, ne)


# --- the full pipeline ----------------------------------------------------------


def test_symmetric_imprimitivity_e2():
    a, b = e2_bundles()
    rep = symmetric_imprimitivity(a, b)
    assert rep.blocks["A_K"] == [2]
    assert rep.blocks["A_H"] == [2]
    assert rep.ok
    assert rep.bimodule.max_residual <= 1e-8


def test_symmetric_imprimitivity_e3():
    a3, b3 = e3_bundles()
    rep = symmetric_imprimitivity(a3, b3)
    assert rep.blocks["A_K"] == [1]
    assert rep.blocks["A_H"] == [2]
    assert len(rep.blocks["A_K"]) == len(rep.blocks["A_H"]) == 1
    assert rep.verdicts["morita_main"]
    assert rep.verdicts["env_quotient_K"] and rep.verdicts["env_quotient_H"]
    assert rep.ok


def test_symmetric_imprimitivity_trivial_groups():
    z1 = cyclic_group(1)
    base = global_action(z1, ("a", "b"), lambda t, x: x)
    ba = BundleAction(base, FiniteBundle({"a": 2, "b": 1}))
    rep = symmetric_imprimitivity(ba, ba)
    assert rep.blocks["A_K"] == rep.blocks["A_H"] == [1, 2]
    assert rep.ok


def test_symmetric_imprimitivity_rejects_noncommuting():
    from padyn.actions import restrict
    from padyn.bundles import restrict_bundle_action

    a, b = e2_bundles()
    keep = {pt(0, 0), pt(0, 1), pt(1, 0)}
    with pytest.raises(ValueError):
        symmetric_imprimitivity(restrict_bundle_action(a, keep), restrict_bundle_action(b, keep))


def test_symmetric_imprimitivity_rejects_nonfree():
    z2 = cyclic_group(2)
    fixed = global_action(z2, ("p", "q"), lambda t, x: x)
    ba = BundleAction(fixed, FiniteBundle({"p": 1, "q": 1}))
    other = BundleAction(
        global_action(z2, ("p", "q"), lambda t, x: ("q" if x == "p" else "p") if t else x),
        FiniteBundle({"p": 1, "q": 1}),
    )
    with pytest.raises(ValueError):
        symmetric_imprimitivity(ba, other)


def test_main_theorem_block_counts_on_random_instances():
    from padyn.systems import random_instance

    for seed in (0, 3, 8, 17):
        inst = random_instance(seed, 6, 3, 2)
        sd = inst.system
        rep = symmetric_imprimitivity(sd.actions["alpha"], sd.actions["beta"], seed=seed)
        assert len(rep.blocks["A_K"]) == len(rep.blocks["A_H"])
        assert rep.ok


def test_env_roundtrip_recorded():
    a3, b3 = e3_bundles()
    rep = symmetric_imprimitivity(a3, b3)
    assert rep.env_roundtrip.sets_match
    assert rep.env_roundtrip.ad_residual <= 1e-10
    assert rep.verdicts["env_roundtrip"]


def symmetric_group_3():
    """S_3 as an explicit table over the six permutations of {0,1,2}."""
    import itertools

    perms = sorted(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}

    def compose(p, q):  # (p o q)(i) = p[q[i]]
        return tuple(p[q[i]] for i in range(3))

    table = [[index[compose(p, q)] for q in perms] for p in perms]
    from padyn.groups import FiniteGroup

    return FiniteGroup(table, name="S3"), perms


def test_symmetric_imprimitivity_nonabelian_translations():
    # left and right translation of S_3 on itself commute, are free and global;
    # both induced crossed products degenerate to the group algebra, whose
    # block profile [1, 1, 2] is the classical irreducible-dimension list
    g, perms = symmetric_group_3()
    pts = tuple(str(i) for i in g.elements())
    left = global_action(g, pts, lambda t, x: str(g.mul(t, int(x))))
    right = global_action(g, pts, lambda t, x: str(g.mul(int(x), g.inv(t))))
    from padyn.actions import commute, is_free

    assert commute(left, right).ok
    assert is_free(left) and is_free(right)
    from padyn.bundles import line_bundle

    rep = symmetric_imprimitivity(line_bundle(left), line_bundle(right))
    assert rep.blocks["A_K"] == [1, 1, 2]
    assert rep.blocks["A_H"] == [1, 1, 2]
    assert rep.ok


def test_symmetric_imprimitivity_partial_nonabelian():
    # restrict both translations of S_3 to the two-element subgroup generated
    # by a transposition: both restrictions become the global swap with the
    # transposition as the only non-identity element acting, so each side is
    # the order-two group algebra, blocks [1, 1] by hand
    g, _ = symmetric_group_3()
    pts = tuple(str(i) for i in g.elements())
    left = global_action(g, pts, lambda t, x: str(g.mul(t, int(x))))
    right = global_action(g, pts, lambda t, x: str(g.mul(int(x), g.inv(t))))
    from padyn.actions import commute
    from padyn.bundles import line_bundle, restrict_bundle_action

    keep = ("0", "1")  # identity and one transposition
    la = restrict_bundle_action(line_bundle(left), keep)
    rb = restrict_bundle_action(line_bundle(right), keep)
    assert commute(la.base, rb.base).ok
    rep = symmetric_imprimitivity(la, rb)
    assert rep.blocks["A_K"] == [1, 1]
    assert rep.blocks["A_H"] == [1, 1]
    assert rep.ok
