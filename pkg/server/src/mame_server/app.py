"""FastAPI application implementing the prediction protocol exactly.

The request body is parsed by hand so every failure mode maps onto the
protocol's error shape: non-200 status with ``{"error": "<message>"}``.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .models import ModelError, ServedModel


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(model: ServedModel) -> FastAPI:
    app = FastAPI(title="mame-oracle-server", docs_url=None, redoc_url=None)

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/predict")
    async def predict(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return _error(400, "malformed body: expected JSON")
        if not isinstance(payload, dict) or "instances" not in payload:
            return _error(400, 'malformed body: missing "instances"')
        instances = payload["instances"]
        if not isinstance(instances, list) or any(
            not isinstance(row, list) for row in instances
        ):
            return _error(400, '"instances" must be a list of feature rows')
        if not instances:
            return {"predictions": []}
        widths = {len(row) for row in instances}
        if widths != {model.n_features}:
            return _error(
                400,
                f"expected {model.n_features} features per instance, "
                f"got widths {sorted(widths)}",
            )
        try:
            Z = np.asarray(instances, dtype=float)
        except (TypeError, ValueError):
            return _error(400, "instances must contain numbers only")
        if not np.all(np.isfinite(Z)):
            return _error(400, "instances must be finite")
        try:
            preds = model.predict(Z)
        except ModelError as exc:
            return _error(400, str(exc))
        if not np.all(np.isfinite(preds)):
            return _error(500, "model produced a non-finite prediction")
        return {"predictions": [float(v) for v in preds]}

    return app
