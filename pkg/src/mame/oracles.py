"""Uniform access to the black box being explained.

Built-in synthetic oracles (linear, piecewise-linear, additive-sine) stand in
for real models in tests and studies; the remote kind speaks the HTTP
prediction protocol documented in PROTOCOL.md at the repository root:

    POST {base}/predict   body {"instances": [[f64, ...], ...]}
                          -> 200 {"predictions": [f64, ...]}  (in order)
    GET  {base}/health    -> 200 {"status": "ok"}

Errors come back as non-200 with {"error": "<message>"}.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import OracleError, OracleTransportError

LINEAR = "linear"
PIECEWISE_LINEAR = "piecewise_linear"
ADDITIVE_SINE = "additive_sine"
REMOTE_HTTP = "remote_http"

_KIND_TAGS = {LINEAR: 0, PIECEWISE_LINEAR: 1, ADDITIVE_SINE: 2}


@dataclass(frozen=True)
class LinearParams:
    w: np.ndarray
    b: float


@dataclass(frozen=True)
class PiecewiseLinearParams:
    """Two affine regimes split on one feature: lo applies where x_j <= threshold."""

    feature: int
    threshold: float
    w_lo: np.ndarray
    b_lo: float
    w_hi: np.ndarray
    b_hi: float


@dataclass(frozen=True)
class AdditiveSineParams:
    amplitude: np.ndarray
    frequency: np.ndarray


@dataclass(frozen=True)
class RemoteParams:
    base_url: str
    timeout_ms: int = 10_000
    batch_size: int = 256
    retries: int = 3


@dataclass(frozen=True)
class Oracle:
    kind: str
    p: int
    params: object

    def predict(self, Z: np.ndarray) -> np.ndarray:
        return predict_batch(self, Z)

    def feature_importance(self) -> np.ndarray | None:
        """Ground-truth per-feature importance, when the oracle exposes one."""
        if self.kind == LINEAR:
            return np.abs(self.params.w)
        if self.kind == PIECEWISE_LINEAR:
            return 0.5 * (np.abs(self.params.w_lo) + np.abs(self.params.w_hi))
        if self.kind == ADDITIVE_SINE:
            return np.abs(self.params.amplitude * self.params.frequency)
        return None


def _predict_builtin(o: Oracle, Z: np.ndarray) -> np.ndarray:
    if o.kind == LINEAR:
        return Z @ o.params.w + o.params.b
    if o.kind == PIECEWISE_LINEAR:
        pr = o.params
        lo = Z @ pr.w_lo + pr.b_lo
        hi = Z @ pr.w_hi + pr.b_hi
        return np.where(Z[:, pr.feature] <= pr.threshold, lo, hi)
    if o.kind == ADDITIVE_SINE:
        pr = o.params
        return np.sin(Z * pr.frequency) @ pr.amplitude
    raise OracleError(f"unknown oracle kind {o.kind!r}")


def _post_chunk(params: RemoteParams, chunk: np.ndarray) -> np.ndarray:
    import requests

    url = params.base_url.rstrip("/") + "/predict"
    payload = {"instances": chunk.tolist()}
    timeout = params.timeout_ms / 1000.0
    attempts = 0
    last_error = ""
    while attempts < max(1, params.retries):
        attempts += 1
        try:
            resp = requests.post(url, json=payload, timeout=timeout)
        except requests.RequestException as exc:
            last_error = str(exc)
            continue
        if resp.status_code != 200:
            try:
                last_error = resp.json().get("error", resp.text)
            except (ValueError, AttributeError):
                last_error = resp.text
            last_error = f"HTTP {resp.status_code}: {last_error}"
            if 400 <= resp.status_code < 500:
                break  # deterministic rejection; retrying cannot help
            continue
        try:
            body = resp.json()
            preds = np.asarray(body["predictions"], dtype=float)
        except (ValueError, KeyError, TypeError) as exc:
            raise OracleTransportError(
                f"{url}: malformed response body after {attempts} attempt(s): {exc}"
            ) from exc
        if preds.shape != (chunk.shape[0],):
            raise OracleTransportError(
                f"{url}: expected {chunk.shape[0]} predictions, "
                f"got shape {preds.shape} after {attempts} attempt(s)"
            )
        if not np.all(np.isfinite(preds)):
            raise OracleError(f"{url}: non-finite prediction in response")
        return preds
    raise OracleTransportError(
        f"{url}: request failed after {attempts} attempt(s): {last_error}"
    )


def predict_batch(o: Oracle, Z: np.ndarray) -> np.ndarray:
    """Query the oracle on the rows of Z; one finite scalar per row.

    The remote kind chunks the query into batches of the configured size and
    concatenates responses in order, so results are batch-size independent.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if Z.shape[1] != o.p:
        raise OracleError(
            f"oracle expects {o.p} features, query has {Z.shape[1]}"
        )
    if Z.shape[0] == 0:
        return np.empty(0)
    if o.kind != REMOTE_HTTP:
        out = _predict_builtin(o, Z)
        if not np.all(np.isfinite(out)):
            raise OracleError("oracle produced a non-finite prediction")
        return out
    params: RemoteParams = o.params
    chunks = [
        _post_chunk(params, Z[s : s + params.batch_size])
        for s in range(0, Z.shape[0], params.batch_size)
    ]
    return np.concatenate(chunks)


def make_synthetic_blackbox(kind: str, p: int, seed: int) -> Oracle:
    """Seeded synthetic oracle standing in for a trained model."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if kind not in _KIND_TAGS:
        raise OracleError(f"unknown synthetic oracle kind {kind!r}")
    rng = np.random.default_rng([int(seed), _KIND_TAGS[kind]])
    if kind == LINEAR:
        return Oracle(
            kind,
            p,
            LinearParams(w=rng.normal(0.0, 1.0, p), b=float(rng.normal())),
        )
    if kind == PIECEWISE_LINEAR:
        return Oracle(
            kind,
            p,
            PiecewiseLinearParams(
                feature=int(rng.integers(p)),
                threshold=0.0,
                w_lo=rng.normal(0.0, 1.0, p),
                b_lo=float(rng.normal()),
                w_hi=rng.normal(0.0, 1.0, p),
                b_hi=float(rng.normal()),
            ),
        )
    return Oracle(
        kind,
        p,
        AdditiveSineParams(
            amplitude=rng.uniform(0.5, 2.0, p),
            frequency=rng.uniform(0.5, 2.0, p),
        ),
    )


def make_remote_oracle(
    base_url: str,
    p: int,
    timeout_ms: int = 10_000,
    batch_size: int = 256,
    retries: int = 3,
) -> Oracle:
    if not base_url:
        base_url = os.environ.get("MAME_ORACLE_URL", "")
    if not base_url:
        raise OracleError("no oracle URL given and MAME_ORACLE_URL is unset")
    return Oracle(
        REMOTE_HTTP,
        p,
        RemoteParams(
            base_url=base_url,
            timeout_ms=timeout_ms,
            batch_size=batch_size,
            retries=retries,
        ),
    )


def oracle_to_json(o: Oracle) -> str:
    """Serializable description (used by run manifests)."""
    params = o.params.__dict__.copy()
    for key, value in params.items():
        if isinstance(value, np.ndarray):
            params[key] = value.tolist()
    return json.dumps({"kind": o.kind, "p": o.p, "params": params}, sort_keys=True)
