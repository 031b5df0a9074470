"""Command implementations shared by the HTTP service and the CLI.

Every command produces a RunReport: a flat envelope of hypotheses, dims,
block lists, residuals and boolean verdicts, plus a command-specific detail
blob.  Reports serialize canonically and map to process exit codes:
0 verified, 1 a verdict failed, 2 invalid input, 3 internal assertion.
"""

from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass, field

from . import __version__
from .actions import is_free, is_global, orbits, validate_action
from .bundles import (
    env_restriction_report,
    enveloping_bundle,
    induced_action_on_sections,
    validate_bundle_action,
)
from .crossed import partial_crossed_product, verify_enveloping_morita
from .imprimitivity import symmetric_imprimitivity
from .induced import orbit_bundle
from .star_algebra import morita_equivalent, wedderburn
from .systems import (
    InvalidSystem,
    SystemDescription,
    canonical_json,
    random_instance,
    serialize_system,
    system_digest,
)

EXIT_VERIFIED = 0
EXIT_VERDICT_FALSE = 1
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3

DEFAULT_TOL = 1e-9
DEFAULT_RESIDUAL_TOL = 1e-7


class PipelineAssertion(RuntimeError):
    """An internal consistency assertion failed; reported with its stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class RunReport:
    command: str
    input_digest: str
    seed: int | None
    tol: float
    version: str
    wall_clock_s: float
    hypotheses: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_VERIFIED if all(self.verdicts.values()) else EXIT_VERDICT_FALSE

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "tol": self.tol,
            "version": self.version,
            "wall_clock_s": self.wall_clock_s,
            "hypotheses": self.hypotheses,
            "dims": self.dims,
            "blocks": self.blocks,
            "residuals": self.residuals,
            "verdicts": self.verdicts,
            "detail": self.detail,
            "exit_code": self.exit_code,
        }


def write_report(report: RunReport, path: str) -> None:
    """Atomic canonical write so repeated runs diff cleanly."""
    data = canonical_json(report.to_dict()) + "\n"
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".padyn-report-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _need_action(sd: SystemDescription, name: str | None, flag: str) -> str:
    if name is None:
        if len(sd.actions) == 1:
            return next(iter(sd.actions))
        raise InvalidSystem([f"{flag}: required (system defines actions {sorted(sd.actions)})"])
    if name not in sd.actions:
        raise InvalidSystem([f"{flag}: unknown action {name!r} (have {sorted(sd.actions)})"])
    return name


def _report(command: str, sd_digest: str, tol: float, seed: int | None, started: float) -> RunReport:
    return RunReport(
        command=command,
        input_digest=sd_digest,
        seed=seed,
        tol=tol,
        version=__version__,
        wall_clock_s=time.perf_counter() - started,
    )


def run_validate(sd: SystemDescription, tol: float = DEFAULT_TOL) -> RunReport:
    started = time.perf_counter()
    report = _report("validate", system_digest(sd), tol, None, started)
    detail = {}
    all_ok = True
    for name, ba in sorted(sd.actions.items()):
        a_rep = validate_action(ba.base)
        b_rep = validate_bundle_action(ba, tol)
        entry = {
            "base_valid": a_rep.valid,
            "bundle_valid": b_rep.valid,
            "is_global": a_rep.is_global,
            "is_free": is_free(ba.base),
            "violations": [f"{v.axiom} at {v.witness}: {v.detail}" for v in b_rep.violations],
        }
        detail[name] = entry
        all_ok = all_ok and b_rep.valid
        report.verdicts[f"{name}_valid"] = b_rep.valid
    report.verdicts["system_valid"] = all_ok
    report.detail = detail
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_orbits(sd: SystemDescription, alpha: str | None = None, tol: float = DEFAULT_TOL) -> RunReport:
    started = time.perf_counter()
    name = _need_action(sd, alpha, "--alpha")
    ba = sd.actions[name]
    orb = orbits(ba.base)
    report = _report("orbits", system_digest(sd), tol, None, started)
    report.dims["classes"] = len(orb.classes)
    report.dims["points"] = len(ba.base.points)
    report.verdicts["partition_ok"] = sum(len(c) for c in orb.classes) == len(ba.base.points)
    report.detail = {
        "action": name,
        "classes": [sorted(c) for c in orb.classes],
        "representatives": list(orb.representative),
    }
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_globalize(sd: SystemDescription, alpha: str | None = None, tol: float = DEFAULT_TOL) -> RunReport:
    started = time.perf_counter()
    name = _need_action(sd, alpha, "--alpha")
    ba = sd.actions[name]
    env = enveloping_bundle(ba)
    rt = env_restriction_report(ba, env)
    report = _report("globalize", system_digest(sd), tol, None, started)
    report.dims["points"] = len(ba.base.points)
    report.dims["env_points"] = len(env.action.base.points)
    report.residuals["roundtrip_ad"] = rt.ad_residual
    report.verdicts["roundtrip_sets"] = rt.sets_match
    report.verdicts["roundtrip_fibers"] = rt.ad_residual <= 1e-10
    report.verdicts["env_is_global"] = is_global(env.action.base)
    report.detail = {
        "action": name,
        "embed": dict(env.embed),
        "was_global": is_global(ba.base),
    }
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_crossed_product(
    sd: SystemDescription,
    alpha: str | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> RunReport:
    """Partial crossed product of the section system, plus the orbit-space algebra."""
    started = time.perf_counter()
    name = _need_action(sd, alpha, "--alpha")
    ba = sd.actions[name]
    apa = induced_action_on_sections(ba)
    cp = partial_crossed_product(apa, tol=tol, seed=seed)
    report = _report("crossed-product", system_digest(sd), tol, seed, started)
    report.dims["crossed_product"] = cp.dim
    report.dims["ideal_dims_sum"] = apa.total_dim
    report.blocks["crossed_product"] = cp.blocks.as_list()
    report.verdicts["dims_match"] = cp.dim == apa.total_dim
    detail = {"action": name, "ideal_dims": apa.dims()}
    if is_free(ba.base):
        env = cp.env if cp.env is not None else enveloping_bundle(ba)
        orbital = orbit_bundle(env.action)
        from .crossed import section_algebra_realization

        alg = section_algebra_realization(orbital.bundle, tol=tol)
        wd = wedderburn(alg, seed=seed, tol=tol)
        report.blocks["orbit_algebra"] = wd.blocks.as_list()
        report.dims["orbit_algebra"] = alg.dim
        report.verdicts["green_morita"] = morita_equivalent(cp.blocks, wd.blocks)
    report.detail = detail
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_enveloping_morita(
    sd: SystemDescription,
    alpha: str | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> RunReport:
    started = time.perf_counter()
    name = _need_action(sd, alpha, "--alpha")
    ba = sd.actions[name]
    rep = verify_enveloping_morita(ba, tol=tol, seed=seed)
    report = _report("enveloping-morita", system_digest(sd), tol, seed, started)
    report.dims["corner"] = rep.corner_dim
    report.dims["corner_expected"] = rep.corner_dim_expected
    report.dims["global"] = rep.global_dim
    report.dims["fullness_rank"] = rep.fullness_rank
    report.blocks["corner"] = rep.corner_blocks.as_list()
    report.blocks["global"] = rep.global_blocks.as_list()
    report.residuals["hereditary"] = rep.hereditary_residual
    report.verdicts["dims_match"] = rep.dims_ok
    report.verdicts["fullness"] = rep.fullness_ok
    report.verdicts["hereditary"] = rep.hereditary_residual <= max(tol * 100, 1e-7)
    report.verdicts["morita"] = rep.morita_ok
    report.detail = {"action": name}
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_imprimitivity(
    sd: SystemDescription,
    alpha: str | None = None,
    beta: str | None = None,
    tol: float = DEFAULT_TOL,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> RunReport:
    started = time.perf_counter()
    names = sorted(sd.actions)
    a_name = _need_action(sd, alpha if alpha else (names[0] if len(names) >= 2 else None), "--alpha")
    b_name = _need_action(sd, beta if beta else (names[1] if len(names) >= 2 else None), "--beta")
    try:
        rep = symmetric_imprimitivity(
            sd.actions[a_name],
            sd.actions[b_name],
            tol=tol,
            residual_tol=residual_tol,
            seed=seed,
            exhaustive=exhaustive,
        )
    except AssertionError as exc:
        raise PipelineAssertion("symmetric-imprimitivity", str(exc)) from exc
    report = _report("imprimitivity", system_digest(sd), tol, seed, started)
    report.hypotheses = rep.hypotheses
    report.dims = rep.dims
    report.blocks = rep.blocks
    report.residuals = rep.residuals
    report.verdicts = rep.verdicts
    report.detail = {
        "alpha": a_name,
        "beta": b_name,
        "fullness_rank_E": rep.bimodule.fullness_rank_E,
        "fullness_rank_F": rep.bimodule.fullness_rank_F,
        "positivity_min_eig": rep.bimodule.positivity_min_eig,
        "exhaustive_bimodule_checks": rep.bimodule.exhaustive,
        "residual_tol": residual_tol,
    }
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_random(
    seed: int = 0,
    bounds: tuple[int, int, int] = (8, 4, 2),
    tol: float = DEFAULT_TOL,
) -> RunReport:
    started = time.perf_counter()
    inst = random_instance(seed, *bounds)
    report = _report("random", system_digest(inst.system), tol, seed, started)
    report.dims["points"] = len(inst.system.space)
    report.verdicts["generated"] = True
    report.detail = {
        "system": serialize_system(inst.system),
        "rejected": inst.rejected,
        "exhausted": inst.exhausted,
    }
    report.wall_clock_s = time.perf_counter() - started
    return report


def run_stress(
    count: int = 200,
    seed: int = 0,
    bounds: tuple[int, int, int] = (8, 4, 2),
    tol: float = DEFAULT_TOL,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> RunReport:
    """Seeded batch of random instances through the full pipeline."""
    started = time.perf_counter()
    rows = []
    all_ok = True
    worst_residual = 0.0
    worst_roundtrip = 0.0
    for i in range(count):
        inst = random_instance(seed + i, *bounds)
        sd = inst.system
        rep = symmetric_imprimitivity(
            sd.actions["alpha"], sd.actions["beta"], tol=tol, residual_tol=residual_tol, seed=seed
        )
        count_ok = len(rep.blocks["A_K"]) == len(rep.blocks["A_H"])
        ok = rep.ok and count_ok
        all_ok = all_ok and ok
        worst_residual = max(worst_residual, rep.bimodule.max_residual)
        worst_roundtrip = max(worst_roundtrip, rep.env_roundtrip.ad_residual)
        rows.append(
            {
                "seed": seed + i,
                "points": len(sd.space),
                "blocks_A_K": rep.blocks["A_K"],
                "blocks_A_H": rep.blocks["A_H"],
                "ok": ok,
            }
        )
    report = _report("stress", f"stress-{seed}-{count}-{bounds}", tol, seed, started)
    report.dims["count"] = count
    report.residuals["worst_bimodule"] = worst_residual
    report.residuals["worst_env_roundtrip"] = worst_roundtrip
    report.verdicts["all_instances"] = all_ok
    report.verdicts["roundtrip"] = worst_roundtrip <= 1e-10
    report.detail = {"bounds": list(bounds), "instances": rows, "residual_tol": residual_tol}
    report.wall_clock_s = time.perf_counter() - started
    return report
