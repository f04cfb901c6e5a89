"""
FastAPI маршруты.
Предоставляет API для построения Σ(λ), решения задачи Штейнера и архива проверок.
"""
from __future__ import annotations

import logging
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from SteinerKit import fractal, solver, verifier
from SteinerKit.common.exceptions import InvalidInputError, SolverFailureError
from SteinerKit.types import LambdaSequence, SolveOptions

from .config import DEFAULT_DEPTH, DEFAULT_LAMBDA, SOLVER_CHUNK_SIZE, SOLVER_JOBS
from .database import ReportKind, find_report, get_report, init_db, list_reports, save_report

logger = logging.getLogger("backend.routes")

MAX_FRACTAL_DEPTH = 16


@asynccontextmanager
async def lifespan(_app: FastAPI):
    init_db()
    logger.info("База отчетов готова")
    yield


app = FastAPI(title="SteinerKit API", version="1.0.0", lifespan=lifespan)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# ---------------------------------------------------------------------------
# Pydantic схемы
# ---------------------------------------------------------------------------

class SolveOptionsBody(BaseModel):
    convergence_tol: float = Field(1e-13, gt=0)
    max_iterations: int = Field(100_000, ge=1)
    prune_with_mst: bool = True


class SolveRequest(BaseModel):
    points: list[tuple[float, float]] = Field(min_length=solver.MIN_TERMINALS, max_length=solver.MAX_TERMINALS)
    options: Optional[SolveOptionsBody] = None


def _solve_options(body: Optional[SolveOptionsBody] = None) -> SolveOptions:
    extra = body.model_dump() if body else {}
    return SolveOptions(parallelism=SOLVER_JOBS, chunk_size=SOLVER_CHUNK_SIZE, **extra)


def _bad_request(e: InvalidInputError) -> HTTPException:
    logger.warning(f"Некорректный запрос: {e}")
    return HTTPException(status_code=400, detail=e.short_str())


# ---------------------------------------------------------------------------
# Фрактал и решатель
# ---------------------------------------------------------------------------

@app.get("/api/fractal")
def get_fractal(lam: float = DEFAULT_LAMBDA, depth: int = Query(DEFAULT_DEPTH, ge=1, le=MAX_FRACTAL_DEPTH)):
    """Дерево Σ(λ) заданной глубины, его длина, ε и результат проверки вложения."""
    try:
        seq = LambdaSequence.constant(lam)
        tree = fractal.build_sigma(seq, depth)
        report = fractal.validate_embedding(tree)
        return {
            "tree": tree.to_dict(),
            "total_length": fractal.total_length(seq, depth),
            "limit_length": fractal.total_length(seq, float("inf")),
            "eps": fractal.epsilon_of(lam),
            "validation": report.to_dict(),
        }
    except InvalidInputError as e:
        raise _bad_request(e)


@app.post("/api/solve")
def post_solve(body: SolveRequest):
    """Точное дерево Штейнера для 3..10 терминалов."""
    try:
        return solver.solve_steiner(body.points, _solve_options(body.options)).to_dict()
    except InvalidInputError as e:
        raise _bad_request(e)
    except SolverFailureError as e:
        logger.error(str(e))
        raise HTTPException(status_code=500, detail=e.short_str())


# ---------------------------------------------------------------------------
# Проверки (с архивом)
# ---------------------------------------------------------------------------

@app.get("/api/verify")
def get_verify(lam: float = DEFAULT_LAMBDA, samples: int = Query(2, ge=1, le=3)):
    """Пакет проверок лемм; повторный запрос с тем же λ отдается из архива."""
    cached = find_report(ReportKind.VERIFY, lam, samples)
    if cached:
        return {**cached["payload"], "report_id": cached["id"], "cached": True}
    try:
        bundle = verifier.run_verification(lam, samples, _solve_options())
    except InvalidInputError as e:
        raise _bad_request(e)
    record = save_report(ReportKind.VERIFY, lam, bundle, bundle["pass"], samples)
    return {**bundle, "report_id": record["id"], "cached": False}


@app.get("/api/theorem")
def get_theorem(lam: float = DEFAULT_LAMBDA, depth: int = Query(3, ge=2, le=verifier.MAX_THEOREM_DEPTH)):
    """Усечение Σ(λ) против точного решения."""
    cached = find_report(ReportKind.THEOREM, lam, depth)
    if cached:
        return {**cached["payload"], "report_id": cached["id"], "cached": True}
    try:
        report = verifier.check_theorem(lam, depth, _solve_options())
    except InvalidInputError as e:
        raise _bad_request(e)
    except SolverFailureError as e:
        logger.error(str(e))
        raise HTTPException(status_code=500, detail=e.short_str())
    payload = report.model_dump()
    record = save_report(ReportKind.THEOREM, lam, payload, report.passed, depth)
    return {**payload, "report_id": record["id"], "cached": False}


@app.get("/api/lemma0")
async def get_lemma0(lam: float = DEFAULT_LAMBDA):
    """Неравенства леммы 0."""
    cached = find_report(ReportKind.LEMMA0, lam)
    if cached:
        return {**cached["payload"], "report_id": cached["id"], "cached": True}
    try:
        bounds = verifier.check_lemma0(lam)
    except InvalidInputError as e:
        raise _bad_request(e)
    payload = bounds.to_report().to_dict()
    record = save_report(ReportKind.LEMMA0, lam, payload, bounds.passed)
    return {**payload, "report_id": record["id"], "cached": False}


@app.get("/api/reports")
async def get_reports(limit: int = Query(50, ge=1, le=500)):
    return list_reports(limit)


@app.get("/api/reports/{report_id}")
async def get_report_by_id(report_id: int):
    report = get_report(report_id)
    if not report:
        raise HTTPException(status_code=404, detail="Отчет не найден")
    return report


@app.get("/api/health")
async def health():
    return {"status": "ok"}
