"""FastAPI service exposing the verification engine over HTTP.

Every endpoint accepts a system description inline and returns the same
report envelope the CLI prints; error mapping mirrors the CLI exit codes
(invalid input -> 422, internal assertion -> 500).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, runner
from ..star_algebra import DegenerateDecomposition
from ..systems import InvalidSystem, load_system
from .models import (
    ActionRequest,
    PairRequest,
    RandomRequest,
    ReportResponse,
    StressRequest,
    SystemRequest,
    VersionResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="padyn",
        version=__version__,
        description="Partial actions on matrix bundles: globalization, crossed products, Morita verdicts.",
    )

    @app.exception_handler(InvalidSystem)
    async def invalid_system_handler(_: Request, exc: InvalidSystem) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": exc.witnesses})

    @app.exception_handler(runner.PipelineAssertion)
    async def pipeline_handler(_: Request, exc: runner.PipelineAssertion) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": str(exc), "stage": exc.stage})

    @app.exception_handler(DegenerateDecomposition)
    async def degeneracy_handler(_: Request, exc: DegenerateDecomposition) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": str(exc), "stage": "wedderburn"})

    @app.get("/version", response_model=VersionResponse)
    def version() -> VersionResponse:
        return VersionResponse(name="padyn", version=__version__)

    @app.post("/validate", response_model=ReportResponse)
    def validate(req: SystemRequest) -> dict:
        sd = load_system(req.system.as_plain(), req.tol)
        return runner.run_validate(sd, req.tol).to_dict()

    @app.post("/orbits", response_model=ReportResponse)
    def orbits(req: ActionRequest) -> dict:
        sd = load_system(req.system.as_plain(), req.tol)
        return runner.run_orbits(sd, req.alpha, req.tol).to_dict()

    @app.post("/globalize", response_model=ReportResponse)
    def globalize(req: ActionRequest) -> dict:
        sd = load_system(req.system.as_plain(), req.tol)
        return runner.run_globalize(sd, req.alpha, req.tol).to_dict()

    @app.post("/crossed-product", response_model=ReportResponse)
    def crossed_product(req: ActionRequest) -> dict:
        sd = load_system(req.system.as_plain(), req.tol)
        return runner.run_crossed_product(sd, req.alpha, req.tol, req.seed).to_dict()

    @app.post("/enveloping-morita", response_model=ReportResponse)
    def enveloping_morita(req: ActionRequest) -> dict:
        sd = load_system(req.system.as_plain(), req.tol)
        return runner.run_enveloping_morita(sd, req.alpha, req.tol, req.seed).to_dict()

    @app.post("/imprimitivity", response_model=ReportResponse)
    def imprimitivity(req: PairRequest) -> dict:
        sd = load_system(req.system.as_plain(), req.tol)
        return runner.run_imprimitivity(
            sd, req.alpha, req.beta, req.tol, req.residual_tol, req.seed
        ).to_dict()

    @app.post("/random-instance", response_model=ReportResponse)
    def random_instance(req: RandomRequest) -> dict:
        return runner.run_random(
            req.seed, (req.max_points, req.max_group_order, req.max_fiber_dim)
        ).to_dict()

    @app.post("/stress", response_model=ReportResponse)
    def stress(req: StressRequest) -> dict:
        return runner.run_stress(
            req.count,
            req.seed,
            (req.max_points, req.max_group_order, req.max_fiber_dim),
            req.tol,
            req.residual_tol,
        ).to_dict()

    return app


app = create_app()


def serve(host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run("padyn.service:app", host=host, port=port)
