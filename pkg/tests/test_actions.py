import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import e1_base, e2_bases, e3_bundles, pt

from padyn.actions import (
    PartialAction,
    commute,
    enveloping,
    global_action,
    is_free,
    is_global,
    left_translation,
    orbits,
    product_action,
    quotient_action,
    restrict,
    stabilizer,
    validate_action,
)
from padyn.groups import cyclic_group


def translation_domains_oracle(n: int, subset: set, t: int) -> set:
    """Set-arithmetic oracle for restricting Z_n translation: S n (S + t)."""
    shifted = {str((int(x) + t) % n) for x in subset}
    return subset & shifted


# --- validation -------------------------------------------------------------


def test_e1_is_valid_not_global():
    report = validate_action(e1_base())
    assert report.valid
    assert not report.is_global


def test_global_action_flag():
    report = validate_action(left_translation(cyclic_group(3)))
    assert report.valid and report.is_global


def test_identity_defect_detected():
    pa = left_translation(cyclic_group(2))
    broken_maps = list(pa.maps)
    broken_maps[0] = {"0": "1", "1": "0"}
    broken = PartialAction(pa.group, pa.points, pa.domains, tuple(broken_maps))
    report = validate_action(broken)
    assert not report.valid
    assert any(v.axiom.startswith("identity") for v in report.violations)


def test_composition_defect_detected():
    # drop a point from X_2 of the full Z_4 translation: axiom 3 must fire
    pa = left_translation(cyclic_group(4))
    domains = list(pa.domains)
    maps = [dict(m) for m in pa.maps]
    domains[2] = frozenset({"0", "1", "3"})
    maps[2].pop("1")  # alpha_2 maps 1 -> 3; removing 3 from the range drops source 1
    broken = PartialAction(pa.group, pa.points, tuple(domains), tuple(maps))
    report = validate_action(broken)
    assert not report.valid


# --- restriction ------------------------------------------------------------


def test_restrict_z4_to_three_points_matches_oracle():
    g = cyclic_group(4)
    full = left_translation(g)
    sub = {"0", "1", "2"}
    pa = restrict(full, sub)
    for t in g.elements():
        assert set(pa.domains[t]) == translation_domains_oracle(4, sub, t)
    assert set(pa.domains[1]) == {"1", "2"}
    assert set(pa.domains[2]) == {"0", "2"}
    assert set(pa.domains[3]) == {"0", "1"}


def test_restrict_to_full_set_is_identity():
    pa = e1_base()
    assert restrict(pa, set(pa.points)) == pa


def test_restrict_rejects_empty():
    with pytest.raises(ValueError):
        restrict(e1_base(), set())


def test_e3_shapes():
    a3, b3 = e3_bundles()
    full = frozenset({pt(0, 0), pt(1, 0)})
    assert a3.base.domains[1] == full  # global swap
    assert b3.base.domains[1] == frozenset()  # empty domain


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=8),
    subset=st.sets(st.integers(min_value=0, max_value=7), min_size=1),
)
def test_restriction_of_global_always_valid(n, subset):
    pts = {str(i % n) for i in subset}
    pa = restrict(left_translation(cyclic_group(n)), pts)
    assert validate_action(pa).valid


# --- orbits, stabilizers ----------------------------------------------------


def test_e1_single_orbit():
    orb = orbits(e1_base())
    assert len(orb.classes) == 1
    assert orb.classes[0] == frozenset({"0", "1", "2"})


def test_empty_domains_give_singletons():
    g = cyclic_group(3)
    pts = ("a", "b")
    domains = (frozenset(pts), frozenset(), frozenset())
    maps = ({"a": "a", "b": "b"}, {}, {})
    pa = PartialAction(g, pts, domains, maps)
    assert validate_action(pa).valid
    orb = orbits(pa)
    assert len(orb.classes) == 2


def test_e3_beta_orbits_singletons():
    _, b3 = e3_bundles()
    assert len(orbits(b3.base).classes) == 2


def test_e1_stabilizer_and_freeness():
    pa = e1_base()
    assert stabilizer(pa, "0") == frozenset({0})
    assert is_free(pa)


def test_fixed_point_not_free():
    g = cyclic_group(2)
    pa = global_action(g, ("p",), lambda t, x: x)
    assert stabilizer(pa, "p") == frozenset({0, 1})
    assert not is_free(pa)


def test_coordinate_translations_free():
    a, b = e2_bases()
    assert is_free(a) and is_free(b)


# --- commutation ------------------------------------------------------------


def commute_condition_i_oracle(a: PartialAction, b: PartialAction):
    """Exhaustive enumeration of condition (i) mismatches."""
    out = []
    for s in a.group.elements():
        for t in b.group.elements():
            left = {a.maps[s][x] for x in a.domains[a.group.inv(s)] & b.domains[t]}
            right = {b.maps[t][x] for x in b.domains[b.group.inv(t)] & a.domains[s]}
            if left != right:
                out.append((s, t, left, right))
    return out


def test_global_coordinate_pair_commutes():
    a, b = e2_bases()
    assert commute(a, b).ok


def test_e3_commutes_via_empty_intersections():
    a3, b3 = e3_bundles()
    assert commute(a3.base, b3.base).ok


def test_punctured_restriction_breaks_commutation():
    a, b = e2_bases()
    keep = {pt(0, 0), pt(0, 1), pt(1, 0)}
    ra, rb = restrict(a, keep), restrict(b, keep)
    report = commute(ra, rb)
    assert not report.ok
    oracle = commute_condition_i_oracle(ra, rb)
    assert oracle
    s, t, left, right = oracle[0]
    assert report.witness.kind == "sets"
    assert (report.witness.s, report.witness.t) == (s, t) == (1, 1)
    assert set(report.witness.left) == left == {pt(1, 0)}
    assert set(report.witness.right) == right == {pt(0, 1)}


def test_commute_is_symmetric():
    a, b = e2_bases()
    keep = {pt(0, 0), pt(0, 1), pt(1, 0)}
    cases = [(a, b), (restrict(a, keep), restrict(b, keep))]
    for x, y in cases:
        assert commute(x, y).ok == commute(y, x).ok


def test_commute_requires_same_points():
    a, _ = e2_bases()
    with pytest.raises(ValueError):
        commute(a, e1_base())


# --- product action ---------------------------------------------------------


def test_product_slices_reproduce_factors():
    a, b = e2_bases()
    prod = product_action(a, b)
    nk = b.group.order
    for s in a.group.elements():
        idx = s * nk + b.group.identity
        assert prod.domains[idx] == a.domains[s]
        assert prod.maps[idx] == a.maps[s]
    for t in b.group.elements():
        idx = a.group.identity * nk + t
        assert prod.domains[idx] == b.domains[t]
        assert prod.maps[idx] == b.maps[t]


def test_product_of_e3_has_empty_mixed_domains():
    a3, b3 = e3_bundles()
    prod = product_action(a3.base, b3.base)
    nk = 2
    assert prod.domains[1 * nk + 1] == frozenset()
    assert prod.domains[0 * nk + 1] == frozenset()
    assert validate_action(prod).valid


def test_product_of_globals_is_global_and_valid():
    a, b = e2_bases()
    prod = product_action(a, b)
    report = validate_action(prod)
    assert report.valid and report.is_global


def test_product_rejects_noncommuting():
    a, b = e2_bases()
    keep = {pt(0, 0), pt(0, 1), pt(1, 0)}
    with pytest.raises(ValueError):
        product_action(restrict(a, keep), restrict(b, keep))


# --- quotient action --------------------------------------------------------


def test_quotient_by_trivial_group_is_same():
    a, _ = e2_bases()
    trivial = global_action(cyclic_group(1), a.points, lambda t, x: x)
    q = quotient_action(a, trivial)
    assert q.domains == a.domains
    assert q.maps == a.maps


def test_e2_quotient_is_swap_on_two_classes():
    a, b = e2_bases()
    q = quotient_action(a, b)  # H acting on X/K
    assert len(q.points) == 2
    assert validate_action(q).valid and is_global(q)
    r0, r1 = q.points
    assert q.maps[1][r0] == r1 and q.maps[1][r1] == r0


def test_e3_quotient_is_swap():
    a3, b3 = e3_bundles()
    q = quotient_action(a3.base, b3.base)  # K-orbits are singletons
    assert len(q.points) == 2
    assert q.maps[1][pt(0, 0)] == pt(1, 0)


# --- enveloping -------------------------------------------------------------


def enveloping_classes_oracle(pa: PartialAction):
    """Brute-force the pair classes by scanning the gluing relation directly."""
    g = pa.group
    pairs = [(t, x) for t in g.elements() for x in pa.points]

    def related(p, q):
        t, x = p
        s, y = q
        u = g.mul(g.inv(s), t)
        return x in pa.domains[g.inv(u)] and pa.maps[u][x] == y

    classes = []
    for p in pairs:
        placed = False
        for cls in classes:
            if any(related(p, q) for q in cls):
                cls.add(p)
                placed = True
                break
        if not placed:
            classes.append({p})
    # merge transitively
    merged = True
    while merged:
        merged = False
        for i in range(len(classes)):
            for j in range(i + 1, len(classes)):
                if any(related(p, q) for p in classes[i] for q in classes[j]):
                    classes[i] |= classes[j]
                    del classes[j]
                    merged = True
                    break
            if merged:
                break
    return classes


def test_e1_enveloping_has_four_points():
    pa = e1_base()
    env = enveloping(pa)
    oracle = enveloping_classes_oracle(pa)
    assert len(env.env_points) == len(oracle) == 4
    assert is_global(env.env_action)
    assert validate_action(env.env_action).valid


def test_e1_enveloping_isomorphic_to_translation():
    pa = e1_base()
    env = enveloping(pa)
    g = pa.group
    # free and transitive, hence isomorphic to the translation by orbit march
    base = env.embed["0"]
    march = {env.env_action.maps[t][base]: t for t in g.elements()}
    assert len(march) == 4
    for t in g.elements():
        for name, k in march.items():
            assert march[env.env_action.maps[t][name]] == g.mul(t, k)


def test_e1_embedding_is_inclusion_like():
    pa = e1_base()
    env = enveloping(pa)
    assert len(set(env.embed.values())) == 3
    # equivariance on domains
    g = pa.group
    for t in g.elements():
        for x, y in pa.maps[t].items():
            assert env.env_action.maps[t][env.embed[x]] == env.embed[y]


def test_enveloping_of_global_is_bijective():
    pa = left_translation(cyclic_group(3))
    env = enveloping(pa)
    assert env.is_bijective
    assert len(env.env_points) == 3


def test_enveloping_of_e3_product_is_klein_translation():
    a3, b3 = e3_bundles()
    prod = product_action(a3.base, b3.base)
    env = enveloping(prod)
    assert len(env.env_points) == 4
    assert is_free(env.env_action)
    assert len(orbits(env.env_action).classes) == 1


def test_enveloping_restriction_recovers_input():
    pa = e1_base()
    env = enveloping(pa)
    embedded = {env.embed[x] for x in pa.points}
    back = restrict(env.env_action, embedded)
    inv_embed = {v: k for k, v in env.embed.items()}
    for t in pa.group.elements():
        assert {inv_embed[z] for z in back.domains[t]} == set(pa.domains[t])
        for x, y in back.maps[t].items():
            assert pa.maps[t][inv_embed[x]] == inv_embed[y]


def test_enveloping_freeness_transfer():
    for pa in (e1_base(), e3_bundles()[0].base):
        assert is_free(pa)
        assert is_free(enveloping(pa).env_action)


def test_orbit_partitions_correspond():
    pa = e1_base()
    env = enveloping(pa)
    orb = orbits(pa)
    env_orb = orbits(env.env_action)
    for x in pa.points:
        for y in pa.points:
            same = orb.class_of[x] == orb.class_of[y]
            same_env = env_orb.class_of[env.embed[x]] == env_orb.class_of[env.embed[y]]
            assert same == same_env


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=6),
    subset=st.sets(st.integers(min_value=0, max_value=5), min_size=1),
)
def test_enveloping_invariants_on_translations(n, subset):
    pts = {str(i % n) for i in subset}
    pa = restrict(left_translation(cyclic_group(n)), pts)
    env = enveloping(pa)
    # embedding is injective and equivariant; env space is the orbit of the image
    assert len(set(env.embed.values())) == len(pa.points)
    reachable = set()
    for name in (env.embed[x] for x in pa.points):
        for t in pa.group.elements():
            reachable.add(env.env_action.maps[t][name])
    assert reachable == set(env.env_points)
