# client.py
# Posts jobs to a running odometer server and returns the artifact content.
import json
import os
import uuid
from typing import Any, Dict, Optional

import requests

BASE = os.getenv("ODOMETER_BASE", "http://localhost:5000")
SECRET = os.getenv("ODOMETER_SHARED_SECRET")
VERSION = os.getenv("ODOMETER_API_VERSION", "1")
TIMEOUT = int(os.getenv("ODOMETER_TIMEOUT", "600"))


def _post(path: str, body: Dict[str, Any], session: Optional[requests.Session] = None) -> Dict[str, Any]:
    if not SECRET or not VERSION:
        raise RuntimeError("missing_secret_or_version")
    http = session or requests
    r = http.post(
        f"{BASE}{path}",
        json=body,
        headers={"Authorization": f"Bearer {SECRET}"},
        timeout=TIMEOUT,
    )
    return r.json()


def post_job(job_type: str, params: Optional[Dict[str, Any]] = None, session: Optional[requests.Session] = None) -> str:
    job = {
        "version": VERSION,
        "job_id": f"j_{job_type}_{uuid.uuid4().hex[:8]}",
        "job_type": job_type,
        "params": params or {},
    }
    resp = _post("/odometer/jobs", job, session)
    if not resp.get("ok"):
        codes = ",".join(e.get("code", "") for e in resp.get("errors", [])) or "unknown"
        raise RuntimeError(f"job_error:{codes}")
    return (resp.get("artifact") or {}).get("content", "")


def canonical(pair: str) -> str:
    return post_job("codec_render", {"pair": pair})


def eliminate(family: str, runs: bool = True) -> Dict[str, Any]:
    return json.loads(post_job("eliminate", {"family": family, "runs": runs}))


if __name__ == "__main__":
    print(canonical("bwd1v1p1v1x0p1x1p0x1duals1v1x2"))
