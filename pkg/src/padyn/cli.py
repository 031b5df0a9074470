"""Thin command-line client for the verification engine.

By default commands run in-process through the same handlers the HTTP
service uses; with --server they are forwarded to a running service and the
returned report is relayed unchanged.  Exit codes: 0 verified, 1 a verdict
failed, 2 invalid input, 3 internal assertion.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, runner
from .star_algebra import DegenerateDecomposition
from .systems import InvalidSystem, canonical_json, load_system_file


def _bounds(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("bounds must be max_points,max_group_order,max_fiber_dim")
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padyn",
        description="Partial actions on matrix bundles: globalization, crossed products, Morita verdicts.",
    )
    parser.add_argument("--version", action="version", version=f"padyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_system: bool = True) -> None:
        if needs_system:
            p.add_argument("--system", required=True, help="path to a system description file")
        p.add_argument("--tol", type=float, default=1e-9, help="entrywise check tolerance")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized numerics")
        p.add_argument("--out", help="write the report to this path (canonical JSON)")
        p.add_argument("--server", help="forward to a running service, e.g. http://localhost:8000")

    p = sub.add_parser("validate", help="validate a system description")
    common(p)

    p = sub.add_parser("orbits", help="orbit classes of one action")
    common(p)
    p.add_argument("--alpha", help="action name")

    p = sub.add_parser("globalize", help="enveloping action with round-trip checks")
    common(p)
    p.add_argument("--alpha", help="action name")

    p = sub.add_parser("crossed-product", help="partial crossed product dims and blocks")
    common(p)
    p.add_argument("--alpha", help="action name")

    p = sub.add_parser("enveloping-morita", help="corner/fullness/Morita checks for one action")
    common(p)
    p.add_argument("--alpha", help="action name")

    p = sub.add_parser("imprimitivity", help="full symmetric-imprimitivity pipeline")
    common(p)
    p.add_argument("--alpha", help="first action name")
    p.add_argument("--beta", help="second action name")
    p.add_argument("--residual-tol", type=float, default=1e-7, dest="residual_tol")

    p = sub.add_parser("serve", help="run the HTTP service under uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    p = sub.add_parser("random", help="emit a deterministic random instance")
    common(p, needs_system=False)
    p.add_argument("--bounds", type=_bounds, default=(8, 4, 2))

    p = sub.add_parser("stress", help="batch of random instances through the pipeline")
    common(p, needs_system=False)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--bounds", type=_bounds, default=(8, 4, 2))
    p.add_argument("--residual-tol", type=float, default=1e-7, dest="residual_tol")

    return parser


_REMOTE_PATHS = {
    "validate": "/validate",
    "orbits": "/orbits",
    "globalize": "/globalize",
    "crossed-product": "/crossed-product",
    "enveloping-morita": "/enveloping-morita",
    "imprimitivity": "/imprimitivity",
    "random": "/random-instance",
    "stress": "/stress",
}


def _remote(args: argparse.Namespace) -> dict:
    import httpx

    payload: dict = {}
    if getattr(args, "system", None):
        with open(args.system, "r", encoding="utf-8") as fh:
            payload["system"] = json.load(fh)
        payload["tol"] = args.tol
    if getattr(args, "alpha", None):
        payload["alpha"] = args.alpha
    if getattr(args, "beta", None):
        payload["beta"] = args.beta
    if args.command in ("imprimitivity", "stress"):
        payload["residual_tol"] = args.residual_tol
    if args.command in ("random", "stress"):
        p, g, f = args.bounds
        payload.update({"seed": args.seed, "max_points": p, "max_group_order": g, "max_fiber_dim": f})
        if args.command == "stress":
            payload.update({"count": args.count, "tol": args.tol})
    elif args.command != "validate":
        payload["seed"] = args.seed
    url = args.server.rstrip("/") + _REMOTE_PATHS[args.command]
    resp = httpx.post(url, json=payload, timeout=600.0)
    if resp.status_code == 422:
        raise InvalidSystem([str(w) for w in resp.json().get("detail", ["invalid input"])])
    if resp.status_code >= 500:
        raise runner.PipelineAssertion("remote", resp.text)
    resp.raise_for_status()
    return resp.json()


def _local(args: argparse.Namespace) -> dict:
    cmd = args.command
    if cmd == "random":
        return runner.run_random(args.seed, args.bounds, args.tol).to_dict()
    if cmd == "stress":
        return runner.run_stress(args.count, args.seed, args.bounds, args.tol, args.residual_tol).to_dict()
    sd = load_system_file(args.system, args.tol)
    if cmd == "validate":
        return runner.run_validate(sd, args.tol).to_dict()
    if cmd == "orbits":
        return runner.run_orbits(sd, args.alpha, args.tol).to_dict()
    if cmd == "globalize":
        return runner.run_globalize(sd, args.alpha, args.tol).to_dict()
    if cmd == "crossed-product":
        return runner.run_crossed_product(sd, args.alpha, args.tol, args.seed).to_dict()
    if cmd == "enveloping-morita":
        return runner.run_enveloping_morita(sd, args.alpha, args.tol, args.seed).to_dict()
    if cmd == "imprimitivity":
        return runner.run_imprimitivity(
            sd, args.alpha, args.beta, args.tol, args.residual_tol, args.seed
        ).to_dict()
    raise SystemExit(f"unknown command {cmd!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        from .service import serve

        serve(args.host, args.port)
        return 0
    try:
        report = _remote(args) if args.server else _local(args)
    except InvalidSystem as exc:
        for witness in exc.witnesses:
            print(f"invalid input: {witness}", file=sys.stderr)
        return runner.EXIT_INVALID_INPUT
    except (runner.PipelineAssertion, AssertionError, DegenerateDecomposition) as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return runner.EXIT_INTERNAL
    except FileNotFoundError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return runner.EXIT_INVALID_INPUT
    text = canonical_json(report)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    return int(report.get("exit_code", runner.EXIT_INTERNAL))


if __name__ == "__main__":
    sys.exit(main())
