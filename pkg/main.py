# main.py
# HTTP job surface for the odometer.
# POST /odometer/jobs with shared-secret auth, version check, schema validation,
# per-job handlers, uniform JobResult response.

import json
import logging
import os
import time
import uuid
from typing import Any, Callable, Dict, List, Literal, Optional

import uvicorn
from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, ValidationError, field_validator

import cli
from bigraph import CodecError
from dimform import FormulaError
from odometer import OdometerAssertion
from qarith import BoundError
from rules_init import health_blob, load_rules
from schema import ClassificationNode, RunConfig

log = logging.getLogger("odometer.main")

# -----------------------------
# Config
# -----------------------------
API_VERSION = os.getenv("ODOMETER_API_VERSION", "1").strip()
SHARED_SECRET = os.getenv("ODOMETER_SHARED_SECRET", "")
MAX_SAMPLES = int(os.getenv("ODOMETER_MAX_SAMPLES", "16"))

load_rules(strict=True)

# -----------------------------
# Schemas
# -----------------------------
JobType = Literal["enumerate", "vines", "eliminate", "gpa_verify", "codec_parse", "codec_render"]


class JobParams(BaseModel):
    run: Optional[RunConfig] = None
    nodes: Optional[List[ClassificationNode]] = None
    index_min: str = cli.SURVEY_WINDOW[0]
    index_max: str = cli.SURVEY_WINDOW[1]
    family: Optional[str] = None
    runs: bool = True
    samples: int = Field(default=5, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)
    pair: Optional[str] = None


class Job(BaseModel):
    version: str
    job_id: str
    job_type: JobType
    params: JobParams = Field(default_factory=JobParams)

    @field_validator("version")
    @classmethod
    def must_match_api_version(cls, v: str) -> str:
        if v != API_VERSION:
            raise ValueError(f"version mismatch: expected {API_VERSION}")
        return v


class JobError(BaseModel):
    code: Literal[
        "auth_error",
        "schema_error",
        "version_error",
        "input_unresolved",
        "engine_refusal",
        "unknown",
    ]
    message: str


class JobArtifact(BaseModel):
    content: str


class JobResult(BaseModel):
    ok: bool
    job_id: str
    artifact_type: Optional[str] = None
    artifact: Optional[JobArtifact] = None
    notes: List[str] = Field(default_factory=list)
    errors: List[JobError] = Field(default_factory=list)
    request_id: str
    latency_ms: int


# -----------------------------
# App
# -----------------------------
app = FastAPI(title="Principal graph odometer", version="0.1.0")


@app.get("/healthz")
def healthz():
    return {"ok": True, "version": API_VERSION, **health_blob()}


def auth_check(header_secret: Optional[str]) -> None:
    """Bearer token or the raw secret (X-Shared-Secret) both pass."""
    given = (header_secret or "").strip()
    secret = (SHARED_SECRET or "").strip()
    if not secret:
        raise HTTPException(status_code=500, detail="ODOMETER_SHARED_SECRET is not set on the server.")
    if not given:
        raise HTTPException(status_code=401, detail="No credentials on the odometer job request.")
    if given not in (f"Bearer {secret}", secret):
        raise HTTPException(status_code=403, detail="Shared secret rejected.")


def failure(payload: Dict[str, Any], t0: float, status: int, code: str, message: str) -> JSONResponse:
    res = JobResult(
        ok=False,
        job_id=str(payload.get("job_id", "unknown")),
        errors=[JobError(code=code, message=message)],
        request_id=str(uuid.uuid4()),
        latency_ms=int((time.perf_counter() - t0) * 1000),
    )
    return JSONResponse(status_code=status, content=res.model_dump())


def make_result(
    job: Job,
    *,
    ok: bool,
    t0: float,
    artifact_type: Optional[str] = None,
    content: Optional[str] = None,
    notes: Optional[List[str]] = None,
    errors: Optional[List[JobError]] = None,
) -> JobResult:
    return JobResult(
        ok=ok,
        job_id=job.job_id,
        artifact_type=artifact_type,
        artifact=JobArtifact(content=content) if content is not None else None,
        notes=notes or [],
        errors=errors or [],
        request_id=str(uuid.uuid4()),
        latency_ms=int((time.perf_counter() - t0) * 1000),
    )


# -----------------------------
# Input checks
# -----------------------------
def validate_minimal_inputs(job: Job) -> Optional[JobError]:
    p = job.params
    if job.job_type == "enumerate" and p.run is None:
        return JobError(code="input_unresolved", message="enumerate requires params.run (a RunConfig)")
    if job.job_type == "vines" and p.nodes is None:
        return JobError(code="input_unresolved", message="vines requires params.nodes (journal entries)")
    if job.job_type == "eliminate" and p.family not in cli.FAMILY_RUNS:
        return JobError(
            code="input_unresolved",
            message="eliminate requires params.family in " + ", ".join(cli.FAMILY_RUNS),
        )
    if job.job_type in ("codec_parse", "codec_render") and not p.pair:
        return JobError(code="input_unresolved", message=f"{job.job_type} requires params.pair")
    if job.job_type == "gpa_verify" and p.samples > MAX_SAMPLES:
        return JobError(code="engine_refusal", message=f"at most {MAX_SAMPLES} phase samples per job")
    return None


# -----------------------------
# Per-job handlers
# -----------------------------
def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def handle_enumerate(job: Job) -> Dict[str, Any]:
    tree = cli.cmd_enumerate(job.params.run)
    content = {"summary": cli.tree_summary(tree), "nodes": [n.model_dump(exclude_none=True) for n in tree.nodes]}
    return {"artifact_type": "classification_tree", "content": _dump(content)}


def handle_vines(job: Job) -> Dict[str, Any]:
    p = job.params
    verdicts = cli.cmd_vines(p.nodes, (p.index_min, p.index_max))
    accepted = sum(1 for v in verdicts if v.accepted)
    return {
        "artifact_type": "vine_report",
        "content": _dump([v.model_dump(exclude_none=True) for v in verdicts]),
        "notes": [f"{accepted} of {len(verdicts)} vines survive the numerical tests"],
    }


def handle_eliminate(job: Job) -> Dict[str, Any]:
    report = cli.eliminate_family(job.params.family, runs=job.params.runs)
    return {"artifact_type": "elimination_report", "content": _dump(report.model_dump()), "notes": report.lines[-1:]}


def handle_gpa_verify(job: Job) -> Dict[str, Any]:
    reports = cli.cmd_gpa_verify(job.params.samples, job.params.tolerance)
    failed = [f"{k}: {c.name}" for k, r in reports.items() for c in r.checks if not c.passed]
    return {
        "artifact_type": "suite_report",
        "content": _dump({k: r.model_dump() for k, r in reports.items()}),
        "notes": failed or ["all checks passed"],
        "ok": not failed,
    }


def handle_codec_parse(job: Job) -> Dict[str, Any]:
    return {"artifact_type": "bigraph_pair", "content": _dump(cli.codec_parse(job.params.pair))}


def handle_codec_render(job: Job) -> Dict[str, Any]:
    return {"artifact_type": "canonical_string", "content": cli.codec_render(job.params.pair)}


JOB_HANDLERS: Dict[str, Callable[[Job], Dict[str, Any]]] = {
    "enumerate": handle_enumerate,
    "vines": handle_vines,
    "eliminate": handle_eliminate,
    "gpa_verify": handle_gpa_verify,
    "codec_parse": handle_codec_parse,
    "codec_render": handle_codec_render,
}

# -----------------------------
# Route
# -----------------------------
@app.post("/odometer/jobs")
async def odometer_jobs(
    request: Request,
    authorization: Optional[str] = Header(default=None),
    x_shared_secret: Optional[str] = Header(default=None),
):
    t0 = time.perf_counter()
    payload: Dict[str, Any] = {}
    try:
        auth_check(authorization or x_shared_secret)

        payload = await request.json()
        try:
            job = Job(**payload)
        except ValidationError as e:
            if "version mismatch:" in str(e):
                return failure(payload, t0, 400, "version_error", f"backend pinned to {API_VERSION}")
            return failure(payload, t0, 400, "schema_error", str(e))

        missing = validate_minimal_inputs(job)
        if missing:
            res = make_result(job, ok=False, errors=[missing], t0=t0)
            return JSONResponse(status_code=422, content=res.model_dump())

        handler = JOB_HANDLERS[job.job_type]
        try:
            outcome = handler(job)
        except (CodecError, BoundError, FormulaError, cli.CliError) as e:
            res = make_result(job, ok=False, errors=[JobError(code="input_unresolved", message=str(e))], t0=t0)
            return JSONResponse(status_code=422, content=res.model_dump())
        except OdometerAssertion as e:
            res = make_result(job, ok=False, errors=[JobError(code="engine_refusal", message=str(e))], t0=t0)
            return JSONResponse(status_code=500, content=res.model_dump())

        res = make_result(
            job,
            ok=outcome.get("ok", True),
            artifact_type=outcome.get("artifact_type"),
            content=outcome.get("content"),
            notes=outcome.get("notes"),
            t0=t0,
        )
        return JSONResponse(status_code=200, content=res.model_dump())

    except HTTPException as hx:
        code = "auth_error" if hx.status_code in (401, 403) else "unknown"
        return failure(payload, t0, hx.status_code, code, str(hx.detail))
    except Exception as e:
        log.exception("job failed")
        return failure(payload if isinstance(payload, dict) else {}, t0, 500, "unknown", str(e))


if __name__ == "__main__":
    port = int(os.getenv("PORT", "5000"))
    uvicorn.run("main:app", host="0.0.0.0", port=port)
