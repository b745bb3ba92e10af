from __future__ import annotations

import logging
import os
from typing import Any, Dict, List, Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.templating import Jinja2Templates
from pydantic import BaseModel, Field

from packages.catalog import FORMULAS, CatalogError, get, list_entries, total_generators
from packages.eqmodel.simulate import DEFAULT_SINGULAR_TOL, simulate
from packages.reduce import audit_published_solution
from packages.storage.db import Storage, report_key
from packages.symexpr.gaussian import GaussianRational
from packages.symmetry.generator import SymmetryGenerator
from packages.symmetry.verify import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE, verify

BASE_DIR = os.path.dirname(__file__)
ROOT_DIR = os.path.abspath(os.path.join(BASE_DIR, "..", ".."))
TEMPLATES_DIR = os.path.join(BASE_DIR, "templates")
DATA_DIR = os.path.join(ROOT_DIR, "data")
DB_PATH = os.getenv("DSYM_DB_PATH", os.path.join(DATA_DIR, "dsym_reports.db"))
LOG_DIR = os.path.join(ROOT_DIR, "logs")
LOG_PATH = os.getenv("DSYM_LOG_PATH", os.path.join(LOG_DIR, "app.log"))

REPORT_VERIFY = "verify"
REPORT_AUDIT = "audit"
MAX_SIMULATE_STEPS = 500

os.makedirs(os.path.dirname(LOG_PATH) or ".", exist_ok=True)
os.makedirs(os.path.dirname(DB_PATH) or ".", exist_ok=True)
logging.basicConfig(
    filename=LOG_PATH,
    level=getattr(logging, os.getenv("DSYM_LOG_LEVEL", "INFO").upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s %(message)s",
)
logger = logging.getLogger("dsym.web")

storage = Storage(DB_PATH)

app = FastAPI(title="dsym")
templates = Jinja2Templates(directory=TEMPLATES_DIR)


class VerifyRequest(BaseModel):
    id: str
    branch: str
    generator: str = Field("1", description="1-based catalog index or label such as X2")
    mode: str = "symbolic"
    samples: int = DEFAULT_SAMPLES
    tol: float = DEFAULT_TOLERANCE
    seed: int = DEFAULT_SEED
    params: Dict[str, str] = Field(default_factory=dict)


class SimulateRequest(BaseModel):
    id: str
    branch: str
    init: List[str]
    n0: int = 0
    steps: int = 30
    mode: str = "exact"
    params: Dict[str, str] = Field(default_factory=dict)
    singular_tol: Optional[float] = None


def _error(status_code: int, message: str) -> JSONResponse:
    return JSONResponse({"status": "error", "error": message}, status_code=status_code)


def _singular_tol(value: Optional[float]) -> float:
    if value is not None:
        return value
    raw = os.getenv("DSYM_FLOAT_SINGULAR_TOL", "").strip()
    try:
        return float(raw) if raw else DEFAULT_SINGULAR_TOL
    except ValueError:
        logger.warning("ignoring DSYM_FLOAT_SINGULAR_TOL=%r", raw)
        return DEFAULT_SINGULAR_TOL


def _params(values: Dict[str, str]) -> Dict[str, GaussianRational]:
    return {name: GaussianRational.parse(text.strip()) for name, text in values.items()}


def _pick_generator(records: Any, ref: str) -> SymmetryGenerator:
    ref = ref.strip()
    if ref.isdigit():
        index = int(ref)
        if not 1 <= index <= len(records):
            raise CatalogError(f"generator index {index} out of range 1..{len(records)}")
        return records[index - 1].generator
    for record in records:
        if record.label == ref:
            return record.generator
    raise CatalogError(f"no generator {ref!r}")


def _audit_rows() -> List[Dict[str, Any]]:
    key = report_key(REPORT_AUDIT, {"formulas": [f.formula_id for f in FORMULAS]})
    cached = storage.get_report(key)
    if cached is not None:
        return cached["rows"]
    rows = []
    for formula in FORMULAS:
        eq = get(formula.equation_id, formula.branch).equation
        for branch in formula.branches:
            result = audit_published_solution(eq, branch)
            row = result.to_json()
            row["anchor"] = formula.anchor
            row["display"] = formula.display
            rows.append(row)
    storage.save_report(key, REPORT_AUDIT, {"rows": rows})
    return rows


@app.get("/", response_class=HTMLResponse)
def catalog_page(request: Request) -> HTMLResponse:
    return templates.TemplateResponse(
        "public/index.html",
        {
            "request": request,
            "entries": list_entries(),
            "total_generators": total_generators(),
            "formulas": [f.to_json() for f in FORMULAS],
        },
    )


@app.get("/api/catalog")
def api_catalog() -> Dict[str, Any]:
    return {"entries": list_entries(), "total_generators": total_generators()}


@app.get("/api/catalog/{entry_id}/{branch}")
def api_catalog_entry(entry_id: str, branch: str) -> Any:
    try:
        return get(entry_id, branch).to_json()
    except CatalogError as exc:
        return _error(404, str(exc))


@app.post("/api/verify")
def api_verify(body: VerifyRequest) -> Any:
    request_payload = body.model_dump()
    key = report_key(REPORT_VERIFY, request_payload)
    cached = storage.get_report(key)
    if cached is not None:
        cached["cached"] = True
        return cached
    try:
        view = get(body.id, body.branch, _params(body.params) or None)
    except CatalogError as exc:
        return _error(404, str(exc))
    except ValueError as exc:
        return _error(400, str(exc))
    try:
        generator = _pick_generator(view.branch.generators, body.generator)
        result = verify(
            view.equation,
            generator,
            mode=body.mode,
            samples=body.samples,
            tol=body.tol,
            seed=body.seed,
        )
    except CatalogError as exc:
        return _error(404, str(exc))
    except (ValueError, ZeroDivisionError) as exc:
        logger.info("verify %s/%s rejected: %s", body.id, body.branch, exc)
        return _error(400, str(exc))
    payload = {
        "status": "ok" if result.passed else "verification_failed",
        "equation": view.equation.describe(),
        "generator": generator.to_json(),
        "anchor": view.branch.anchor or view.entry.anchor,
        "report": result.to_json(),
    }
    storage.save_report(key, REPORT_VERIFY, payload)
    payload["cached"] = False
    return payload


@app.post("/api/simulate")
def api_simulate(body: SimulateRequest) -> Any:
    if body.steps < 0 or body.steps > MAX_SIMULATE_STEPS:
        return _error(400, f"steps must be within 0..{MAX_SIMULATE_STEPS}")
    try:
        view = get(body.id, body.branch, _params(body.params) or None)
    except CatalogError as exc:
        return _error(404, str(exc))
    except ValueError as exc:
        return _error(400, str(exc))
    try:
        init = [GaussianRational.parse(text.strip()) for text in body.init]
        trajectory = simulate(
            view.equation,
            init,
            n0=body.n0,
            steps=body.steps,
            mode=body.mode,
            singular_tol=_singular_tol(body.singular_tol),
        )
    except (ValueError, ZeroDivisionError) as exc:
        logger.info("simulate %s/%s rejected: %s", body.id, body.branch, exc)
        return _error(400, str(exc))
    return {
        "status": "ok",
        "equation": view.equation.describe(),
        "first_singular": trajectory.first_singular(),
        "trajectory": trajectory.to_json(),
    }


@app.get("/api/audits")
def api_audits(formula_id: Optional[str] = Query(None)) -> Any:
    try:
        rows = _audit_rows()
    except (ValueError, ZeroDivisionError, RuntimeError):
        logger.exception("audit run failed")
        return _error(500, "audit run failed")
    if formula_id:
        rows = [row for row in rows if row["formula_id"] == formula_id]
        if not rows:
            return _error(404, f"unknown published formula {formula_id!r}")
    return {"audits": rows}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("apps.web.main:app", host="127.0.0.1", port=8000, reload=True)
