"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 6 and 7 share a single 200-instance stress run (session fixture) so
the suite stays inside its time budget.
"""

import time
from contextlib import contextmanager

import pytest

from _instances import e1_bundle, e2_bases, e2_bundles, e3_bundles, pt

from padyn.actions import commute, restrict
from padyn.bundles import induced_action_on_sections
from padyn.crossed import (
    partial_crossed_product,
    section_algebra_realization,
    verify_enveloping_morita,
)
from padyn.imprimitivity import symmetric_imprimitivity
from padyn.induced import orbit_bundle
from padyn.star_algebra import BlockStructure, morita_equivalent, wedderburn
from padyn.systems import random_instance

STRESS_COUNT = 200
STRESS_BOUNDS = (8, 4, 2)

_collected_algebras = []


@contextmanager
def criterion(n: int, label: str, limit_s: float):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {n}: {label}")
        raise
    elapsed = time.perf_counter() - started
    if elapsed > limit_s:
        print(f"FAIL criterion {n}: {label} (runtime {elapsed:.2f}s > {limit_s}s)")
        raise AssertionError(f"criterion {n} exceeded its runtime budget: {elapsed:.2f}s")
    print(f"PASS criterion {n}: {label} ({elapsed:.2f}s)")


@pytest.fixture(scope="session")
def stress_results():
    """200 seeded instances through the full pipeline, with wall clock."""
    started = time.perf_counter()
    rows = []
    for i in range(STRESS_COUNT):
        inst = random_instance(i, *STRESS_BOUNDS)
        sd = inst.system
        rep = symmetric_imprimitivity(sd.actions["alpha"], sd.actions["beta"], seed=i)
        rows.append(rep)
    return rows, time.perf_counter() - started


def test_criterion_1_green_type_check():
    with criterion(1, "restricted-translation line bundle: dim 9, blocks [3] vs orbit algebra [1]", 1.0):
        ba = e1_bundle()
        apa = induced_action_on_sections(ba)
        cp = partial_crossed_product(apa)
        assert cp.dim == 9
        assert cp.blocks == BlockStructure((3,))
        _collected_algebras.append(cp.algebra)
        env = cp.env
        orbital = orbit_bundle(env.action)
        alg = section_algebra_realization(orbital.bundle)
        wd = wedderburn(alg)
        assert wd.blocks == BlockStructure((1,))
        _collected_algebras.append(alg)
        assert morita_equivalent(cp.blocks, wd.blocks)


def test_criterion_2_enveloping_theorem():
    with criterion(2, "corner dim 9 in the dim-16 globalization, full and Morita-equivalent", 1.0):
        rep = verify_enveloping_morita(e1_bundle())
        assert rep.corner_dim == 9
        assert rep.global_dim == 16
        assert rep.fullness_ok
        assert rep.morita_ok
        assert rep.corner_blocks == BlockStructure((3,))
        assert rep.global_blocks == BlockStructure((4,))


def test_criterion_3_global_toy():
    with criterion(3, "global coordinate pair: blocks [2]/[2], residuals <= 1e-8, full", 5.0):
        a, b = e2_bundles()
        rep = symmetric_imprimitivity(a, b, exhaustive=True)
        assert rep.blocks["A_K"] == [2]
        assert rep.blocks["A_H"] == [2]
        bim = rep.bimodule
        assert bim.max_residual <= 1e-8
        assert bim.positivity_E and bim.positivity_F
        assert bim.fullness_rank_E == bim.dim_E == 4
        assert bim.fullness_rank_F == bim.dim_F == 4
        assert rep.ok


def test_criterion_4_genuinely_partial_instance():
    with criterion(4, "partial pair: blocks [1]/[2], counts equal, quotient-globalization checks", 5.0):
        a3, b3 = e3_bundles()
        rep = symmetric_imprimitivity(a3, b3)
        assert rep.blocks["A_K"] == [1]
        assert rep.blocks["A_H"] == [2]
        assert len(rep.blocks["A_K"]) == 1 == len(rep.blocks["A_H"])
        assert rep.verdicts["morita_main"]
        assert rep.verdicts["env_quotient_K"] and rep.verdicts["env_quotient_H"]
        assert rep.ok


def test_criterion_5_commutation_not_automatic():
    with criterion(5, "punctured restriction breaks commutation with the stated witness", 1.0):
        a, b = e2_bases()
        keep = {pt(0, 0), pt(0, 1), pt(1, 0)}
        report = commute(restrict(a, keep), restrict(b, keep))
        assert not report.ok
        w = report.witness
        assert w.kind == "sets"
        assert (w.s, w.t) == (1, 1)
        assert set(w.left) == {pt(1, 0)}
        assert set(w.right) == {pt(0, 1)}
        # exhaustive enumeration oracle agrees
        ra, rb = restrict(a, keep), restrict(b, keep)
        mism = []
        for s in ra.group.elements():
            for t in rb.group.elements():
                left = {ra.maps[s][x] for x in ra.domains[ra.group.inv(s)] & rb.domains[t]}
                right = {rb.maps[t][x] for x in rb.domains[rb.group.inv(t)] & ra.domains[s]}
                if left != right:
                    mism.append((s, t, left, right))
        assert ((1, 1, {pt(1, 0)}, {pt(0, 1)})) in mism


def test_criterion_6_stress_suite(stress_results):
    rows, elapsed = stress_results
    label = f"{STRESS_COUNT} seeded instances in {elapsed:.1f}s: equal block counts, residuals <= 1e-7"
    with criterion(6, label, 300.0):
        assert elapsed < 300.0, f"stress run took {elapsed:.1f}s"
        assert len(rows) == STRESS_COUNT
        for rep in rows:
            assert len(rep.blocks["A_K"]) == len(rep.blocks["A_H"])
            assert rep.bimodule.max_residual <= 1e-7
            assert rep.verdicts["morita_main"]


def test_criterion_7_globalization_roundtrip(stress_results):
    rows, _ = stress_results
    with criterion(7, "every stress instance restricts its globalization back exactly and up to Ad", 60.0):
        for rep in rows:
            assert rep.env_roundtrip.sets_match
            assert rep.env_roundtrip.ad_residual <= 1e-10


def test_criterion_8_wedderburn_soundness():
    with criterion(8, "block squares sum to dimension; profile invariant under conjugation", 30.0):
        from padyn.star_algebra import conjugated

        a3, b3 = e3_bundles()
        rep3 = symmetric_imprimitivity(a3, b3)
        a2, b2 = e2_bundles()
        rep2 = symmetric_imprimitivity(a2, b2)
        for rep in (rep2, rep3):
            for key in ("A_K", "A_H", "G_K", "G_H"):
                blocks = rep.blocks[key]
                assert sum(n * n for n in blocks) == rep.dims[key]
        cp = partial_crossed_product(induced_action_on_sections(e1_bundle()))
        assert sum(n * n for n in cp.blocks.block_dims) == cp.dim
        algebras = list(_collected_algebras) or [cp.algebra]
        for i, alg in enumerate(algebras):
            rotated = conjugated(alg, seed=100 + i)
            assert wedderburn(alg).blocks == wedderburn(rotated).blocks
