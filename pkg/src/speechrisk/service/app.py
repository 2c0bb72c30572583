"""HTTP surface: one POST route per pipeline stage plus a health probe.

Domain errors map to structured HTTP errors carrying the exception class
name, so clients can distinguish bad requests from missing data without
parsing prose.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import MissingFileError, SpeechRiskError
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(title="speechrisk", version=__version__)

    def _guard(fn, req):
        try:
            return fn(req)
        except MissingFileError as exc:
            raise HTTPException(status_code=404, detail={
                "error": type(exc).__name__, "message": str(exc)}) from exc
        except SpeechRiskError as exc:
            raise HTTPException(status_code=422, detail={
                "error": type(exc).__name__, "message": str(exc)}) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail={
                "error": type(exc).__name__, "message": str(exc)}) from exc

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/v1/segment", response_model=schemas.SegmentResponse)
    def segment(req: schemas.SegmentRequest) -> schemas.SegmentResponse:
        return _guard(handlers.handle_segment, req)

    @app.post("/v1/extract", response_model=schemas.ExtractResponse)
    def extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
        return _guard(handlers.handle_extract, req)

    @app.post("/v1/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        return _guard(handlers.handle_evaluate, req)

    @app.post("/v1/ablation", response_model=schemas.AblationResponse)
    def ablation(req: schemas.AblationRequest) -> schemas.AblationResponse:
        return _guard(handlers.handle_ablation, req)

    @app.post("/v1/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest) -> schemas.SynthResponse:
        return _guard(handlers.handle_synth, req)

    @app.post("/v1/stats", response_model=schemas.StatsResponse)
    def stats(req: schemas.StatsRequest) -> schemas.StatsResponse:
        return _guard(handlers.handle_stats, req)

    return app
