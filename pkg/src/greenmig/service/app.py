"""HTTP front end over the core package. Handlers only translate between
wire models and core calls; no policy logic lives here."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..energy import TraceGenConfig, generate_trace, serialize_trace
from ..feasibility import GIB, assess, breakeven_curve, phase_grid
from ..orchestrator import PolicyKind
from ..simulator import (compare, compare_table_csv, metrics_document, run,
                         validate_classes, validation_csv)
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="greenmig", version=schemas.HealthResponse().version)

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        # Core validation failures surface as 422s, same as schema failures.
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health():
        return schemas.HealthResponse()

    @app.post("/feasibility/assess", response_model=schemas.VerdictModel)
    async def feasibility_assess(req: schemas.AssessRequest):
        verdict = assess(req.size_gib * GIB, req.gbps * 1e9,
                         req.window_remaining_s, req.params.to_params(),
                         sigma_s=req.sigma_s, epsilon=req.epsilon)
        return schemas.VerdictModel.from_verdict(verdict)

    @app.post("/feasibility/phase-grid", response_model=schemas.PhaseGridResponse)
    async def feasibility_phase_grid(req: schemas.PhaseGridRequest):
        cells = phase_grid([int(round(s * GIB)) for s in req.sizes_gib],
                           [b * 1e9 for b in req.bandwidths_gbps],
                           req.params.to_params())
        return schemas.PhaseGridResponse(
            cells=[schemas.PhaseCellModel.from_cell(c) for c in cells])

    @app.post("/feasibility/breakeven-curve", response_model=schemas.BreakevenResponse)
    async def feasibility_breakeven(req: schemas.BreakevenRequest):
        points = breakeven_curve([int(round(s * GIB)) for s in req.sizes_gib],
                                 req.gbps * 1e9, req.params.to_params())
        return schemas.BreakevenResponse(
            points=[schemas.BreakevenPointModel.from_point(p) for p in points])

    @app.post("/trace/generate", response_model=schemas.TraceResponse)
    async def trace_generate(req: schemas.TraceRequest):
        traces = generate_trace(TraceGenConfig(
            seed=req.seed, horizon_s=req.horizon_s, sites=req.sites,
            mean_duration_s=req.mean_window_s,
            min_duration_s=req.min_window_s,
            max_duration_s=req.max_window_s,
            windows_per_site_per_day=req.windows_per_site_per_day))
        windows = [schemas.WindowModel(site=w.site, start_s=w.start_s,
                                       duration_s=w.duration_s)
                   for t in traces for w in t.windows]
        return schemas.TraceResponse(windows=windows,
                                     csv=serialize_trace(traces))

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    async def simulate(req: schemas.SimulateRequest):
        report = run(req.config.to_config(), PolicyKind(req.policy),
                     trace_text=req.trace_csv, jobs_text=req.jobs_csv,
                     topology_text=req.topology_csv)
        return schemas.SimulateResponse(
            report=schemas.MetricsModel.from_report(report),
            document=metrics_document(report))

    @app.post("/simulate/compare", response_model=schemas.CompareResponse)
    async def simulate_compare(req: schemas.CompareRequest):
        reports = compare(req.config.to_config(), trace_text=req.trace_csv,
                          jobs_text=req.jobs_csv, topology_text=req.topology_csv)
        return schemas.CompareResponse(
            reports=[schemas.MetricsModel.from_report(r) for r in reports],
            table_csv=compare_table_csv(reports))

    @app.post("/simulate/validate", response_model=schemas.ValidateResponse)
    async def simulate_validate(req: schemas.ValidateRequest):
        rows = validate_classes(req.config.to_config(),
                                tuple(req.sizes_gib))
        return schemas.ValidateResponse(
            rows=[schemas.ValidationRowModel.from_row(r) for r in rows],
            csv=validation_csv(rows))

    return app


app = create_app()
