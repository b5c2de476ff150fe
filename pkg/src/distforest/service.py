"""HTTP service exposing prediction and neighbor queries for the decision UI.

One model (plus its training cohort) is loaded per process; all endpoints are
read-only and deterministic, so concurrent identical requests return
identical bodies. Structural request problems return 400 with field-level
messages, out-of-range features 422, and a missing model 503.
"""
from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .cohort import DEFAULT_SCHEMA, load_cohort
from .data import Dataset, FEATURE_NAMES, FeatureVector, feature_errors
from .forest import Forest
from .model_io import load_model
from .reporting import model_info, neighbors_response, prediction_response

DEFAULT_PORT = 8723

#: canonical feature -> wire field name (matches the cohort CSV headers)
WIRE_FIELDS = {name: DEFAULT_SCHEMA[name] for name in FEATURE_NAMES}


@dataclass
class ModelBundle:
    forest: Forest
    data: Dataset


class FingerprintMismatch(RuntimeError):
    pass


def load_bundle(model_path, cohort_path, force: bool = False) -> ModelBundle:
    data, _ = load_cohort(cohort_path)
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", UserWarning)
        forest = load_model(model_path)
    if forest.dataset_fingerprint != data.fingerprint():
        if not force:
            raise FingerprintMismatch(
                "cohort does not match the model's training-data fingerprint"
            )
    return ModelBundle(forest=forest, data=data)


def _parse_features(body) -> tuple[FeatureVector | None, list[dict], int]:
    """Validate a request body; returns (vector, errors, http_status).

    Missing/non-numeric fields are structural (400); values of the right
    shape but outside their range are semantic (422).
    """
    if not isinstance(body, dict):
        return None, [{"field": "body", "message": "request body must be a JSON object"}], 400
    structural: list[dict] = []
    values = {}
    for name in FEATURE_NAMES:
        wire = WIRE_FIELDS[name]
        if wire not in body:
            structural.append({"field": wire, "message": "missing required field"})
            continue
        raw = body[wire]
        if name == "lymph_nodes" and (raw is None or (isinstance(raw, str) and raw.upper() == "NA")):
            values[name] = -1.0
            continue
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            structural.append({"field": wire, "message": "must be a number"})
            continue
        values[name] = float(raw)
    if structural:
        return None, structural, 400
    ordered = [values[name] for name in FEATURE_NAMES]
    range_errors = [
        {"field": WIRE_FIELDS[name], "message": message}
        for name, message in feature_errors(ordered)
    ]
    if range_errors:
        return None, range_errors, 422
    return FeatureVector.from_mapping(values), [], 200


async def _json_body(request: Request):
    try:
        return await request.json(), None
    except Exception:
        return None, JSONResponse(
            {"errors": [{"field": "body", "message": "request body is not valid JSON"}]},
            status_code=400,
        )


def create_app(bundle: ModelBundle | None) -> FastAPI:
    app = FastAPI(title="distforest", docs_url=None, redoc_url=None)
    app.state.bundle = bundle

    def unavailable() -> JSONResponse:
        return JSONResponse({"error": "model not loaded"}, status_code=503)

    @app.get("/api/v1/model/info")
    async def info():
        if app.state.bundle is None:
            return unavailable()
        return JSONResponse(model_info(app.state.bundle.forest))

    @app.post("/api/v1/predict")
    async def predict(request: Request):
        if app.state.bundle is None:
            return unavailable()
        body, error = await _json_body(request)
        if error is not None:
            return error
        fv, errors, status = _parse_features(body)
        if errors:
            return JSONResponse({"errors": errors}, status_code=status)
        b = app.state.bundle
        return JSONResponse(prediction_response(b.forest, b.data, fv))

    @app.post("/api/v1/neighbors")
    async def neighbors(request: Request):
        if app.state.bundle is None:
            return unavailable()
        body, error = await _json_body(request)
        if error is not None:
            return error
        k = 10
        if isinstance(body, dict) and "k" in body:
            raw_k = body["k"]
            if isinstance(raw_k, bool) or not isinstance(raw_k, int) or raw_k < 1:
                return JSONResponse(
                    {"errors": [{"field": "k", "message": "must be a positive integer"}]},
                    status_code=400,
                )
            k = raw_k
        fv, errors, status = _parse_features(body)
        if errors:
            return JSONResponse({"errors": errors}, status_code=status)
        b = app.state.bundle
        return JSONResponse(neighbors_response(b.forest, b.data, fv, k))

    return app
