"""Shared test helpers: synthetic pipelines, reference solvers, a wire server.

The reference implementations here (ISTA lasso, dense linear-system solves,
brute-force metrics) deliberately share no code with the package internals;
they are the independent side of every dual-route check.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from mame.data import Dataset, RunConfig, feature_stats
from mame.graph import PriorGraph, prediction_chain_graph
from mame.lasso import LeafFit, fit_leaves
from mame.neighborhood import CoordinateMap, build_neighborhoods
from mame.oracles import (
    Oracle,
    PiecewiseLinearParams,
    make_synthetic_blackbox,
    predict_batch,
)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "protocol_fixtures"


# ---------------------------------------------------------------------------
# Synthetic pipeline fixtures
# ---------------------------------------------------------------------------


@dataclass
class PipelineFixture:
    dataset: Dataset
    oracle: Oracle
    stats: object
    coord_map: CoordinateMap
    nbhds: list
    leaf: LeafFit
    graph: PriorGraph
    cfg: RunConfig

    @property
    def n(self) -> int:
        return len(self.nbhds)

    @property
    def p(self) -> int:
        return self.dataset.p


def gaussian_dataset(n: int, p: int, seed: int, loc: np.ndarray | None = None):
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, 1.0, (n, p))
    if loc is not None:
        X = X + loc
    return Dataset(
        X=X,
        feature_names=tuple(f"f{j}" for j in range(p)),
        feature_kind=tuple(["continuous"] * p),
        row_ids=tuple(str(i) for i in range(n)),
    )


def build_pipeline(
    n: int,
    p: int,
    kind: str = "additive_sine",
    seed: int = 0,
    cfg: RunConfig | None = None,
    oracle: Oracle | None = None,
    dataset: Dataset | None = None,
    graph: PriorGraph | None = None,
    target_k: int | None = None,
) -> PipelineFixture:
    cfg = cfg or RunConfig(seed=seed)
    dataset = dataset or gaussian_dataset(n, p, seed)
    oracle = oracle or make_synthetic_blackbox(kind, p, seed)
    stats = feature_stats(dataset, np.arange(dataset.n))
    coord_map = CoordinateMap.identity(dataset.p)
    nbhds = build_neighborhoods(
        dataset, stats, oracle, coord_map, cfg, np.arange(dataset.n)
    )
    leaf = fit_leaves(nbhds, target_k or cfg.target_nonzeros)
    if graph is None:
        graph = prediction_chain_graph(predict_batch(oracle, dataset.X))
    return PipelineFixture(
        dataset=dataset,
        oracle=oracle,
        stats=stats,
        coord_map=coord_map,
        nbhds=nbhds,
        leaf=leaf,
        graph=graph,
        cfg=cfg,
    )


def two_regime_fixture(
    n: int = 60,
    p: int = 4,
    seed: int = 42,
    cfg: RunConfig | None = None,
) -> tuple[PipelineFixture, np.ndarray, np.ndarray, np.ndarray]:
    """Piecewise-linear oracle with zero biases and well-separated regimes.

    Anchors sit at x_0 ~ +/-5 so unit-variance perturbations essentially
    never cross the threshold; within each regime the black box is exactly
    linear. The prior graph chains instances within each regime only.
    Returns (fixture, w_lo, w_hi, regime_of_instance).
    """
    cfg = cfg or RunConfig(seed=seed)
    rng = np.random.default_rng(seed)
    w_lo = rng.uniform(-2.0, 2.0, p)
    w_hi = rng.uniform(-2.0, 2.0, p)
    oracle = Oracle(
        "piecewise_linear",
        p,
        PiecewiseLinearParams(
            feature=0, threshold=0.0,
            w_lo=w_lo, b_lo=0.0, w_hi=w_hi, b_hi=0.0,
        ),
    )
    half = n // 2
    X = rng.normal(0.0, 1.0, (n, p))
    X[:half, 0] = -5.0 + 0.5 * rng.normal(size=half)
    X[half:, 0] = 5.0 + 0.5 * rng.normal(size=n - half)
    dataset = Dataset(
        X=X,
        feature_names=tuple(f"f{j}" for j in range(p)),
        feature_kind=tuple(["continuous"] * p),
        row_ids=tuple(str(i) for i in range(n)),
    )
    lo_idx = np.arange(half)
    hi_idx = np.arange(half, n)
    edges_i = np.concatenate([lo_idx[:-1], hi_idx[:-1]])
    edges_j = np.concatenate([lo_idx[1:], hi_idx[1:]])
    graph = PriorGraph(
        n=n, edge_i=edges_i, edge_j=edges_j,
        weights=np.ones(edges_i.size),
    )
    fixture = build_pipeline(
        n, p, seed=seed, cfg=cfg, oracle=oracle, dataset=dataset, graph=graph
    )
    regime = np.array([0] * half + [1] * (n - half))
    return fixture, w_lo, w_hi, regime


# ---------------------------------------------------------------------------
# Independent reference solvers
# ---------------------------------------------------------------------------


def ista_lasso(Q, c, alpha, max_iter=2_000_000, tol=1e-13):
    """Proximal gradient on theta'Q theta - 2 c'theta + alpha ||theta||_1.

    Independent of the coordinate-descent path used by the package.
    """
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float)
    lip = 2.0 * float(np.linalg.eigvalsh(Q)[-1])
    if lip <= 0:
        return np.zeros_like(c)
    step = 1.0 / lip
    theta = np.zeros_like(c)
    for _ in range(max_iter):
        grad = 2.0 * (Q @ theta - c)
        z = theta - step * grad
        new = np.sign(z) * np.maximum(np.abs(z) - step * alpha, 0.0)
        if np.max(np.abs(new - theta)) < tol:
            return new
        theta = new
    return theta


def weighted_ls(G, psi, f):
    """Closed-form weighted least squares via normal equations."""
    wG = G * psi[:, None]
    return np.linalg.solve(G.T @ wG, wG.T @ f)


def dense_theta_system(A, D_dense, rho):
    """Materialize the theta-update operator as a dense (pn x pn) matrix.

    Built from the mathematical definition, not the package's matvec: block
    A_i on column i, plus rho I, plus rho kron(D D', I_p) acting across
    columns.
    """
    n, p, _ = A.shape
    L = D_dense @ D_dense.T
    size = p * n

    def apply(X):
        out = np.empty_like(X)
        for i in range(n):
            out[:, i] = A[i] @ X[:, i]
        out += rho * X
        out += rho * (X @ L)
        return out

    M = np.empty((size, size))
    for col in range(size):
        basis = np.zeros(size)
        basis[col] = 1.0
        M[:, col] = apply(basis.reshape(p, n)).ravel()
    return M


def brute_force_tau_b(a, b):
    """O(p^2) concordant/discordant pair counting with tie correction."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    concordant = discordant = ties_a = ties_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da, db = a[i] - a[j], b[i] - b[j]
            if da == 0 and db == 0:
                ties_a += 1
                ties_b += 1
            elif da == 0:
                ties_a += 1
            elif db == 0:
                ties_b += 1
            elif da * db > 0:
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = np.sqrt((n0 - ties_a) * (n0 - ties_b))
    if denom == 0:
        return float("nan")
    return (concordant - discordant) / denom


# ---------------------------------------------------------------------------
# In-process reference wire server
# ---------------------------------------------------------------------------


class LinearWireServer:
    """Minimal stdlib server implementing the prediction protocol.

    Serves f(x) = w . x + b; can inject transient failures to exercise the
    client's retry accounting.
    """

    def __init__(self, w, b, fail_first: int = 0):
        self.w = np.asarray(w, dtype=float)
        self.b = float(b)
        self.fail_remaining = fail_first
        self.requests_seen = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # silence test output
                pass

            def _send(self, status, payload):
                body = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/health":
                    self._send(200, {"status": "ok"})
                else:
                    self._send(404, {"error": "not found"})

            def do_POST(self):
                if self.path != "/predict":
                    self._send(404, {"error": "not found"})
                    return
                outer.requests_seen += 1
                if outer.fail_remaining > 0:
                    outer.fail_remaining -= 1
                    self._send(503, {"error": "transient failure"})
                    return
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                try:
                    payload = json.loads(raw)
                    instances = payload["instances"]
                except (ValueError, KeyError, TypeError):
                    self._send(400, {"error": "malformed body"})
                    return
                preds = []
                for row in instances:
                    if len(row) != outer.w.size:
                        self._send(
                            400,
                            {"error": f"expected {outer.w.size} features"},
                        )
                        return
                    preds.append(float(np.dot(outer.w, row) + outer.b))
                self._send(200, {"predictions": preds})

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()




# Acceptance criteria append one line each; the conftest terminal-summary
# hook prints them after the run.
ACCEPTANCE_LINES: list[str] = []
