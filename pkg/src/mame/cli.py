"""Command-line surface: explain | tree | eval | compare | ar-study.

Every run resolves a full configuration (all solver knobs have flags, all
randomness flows from --seed), writes its outputs as files into --out-dir,
and drops a run_manifest.json capturing the resolved configuration so the
run can be reproduced byte-identically. Failures exit 1 with a single-line
JSON error on stderr.
"""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .baselines import (
    feature_importance,
    feature_importance_multilevel,
    sp_lime_pick,
    two_step_medians,
    two_step_path,
)
from .data import Dataset, RunConfig, feature_stats, load_csv, split_dataset
from .errors import MameError
from .evaluation import (
    ar_exact_study,
    fidelity_at_view,
    importance_ranks,
    kendall_tau,
)
from .graph import load_side_info, prediction_chain_graph
from .lasso import fit_leaves
from .neighborhood import (
    DEFAULT_FLIP_PROB,
    CoordinateMap,
    KernelConfig,
    build_neighborhoods,
)
from .oracles import (
    make_remote_oracle,
    make_synthetic_blackbox,
    oracle_to_json,
    predict_batch,
)
from .solver import run_ar_path, run_exact_path, solver_backend_name
from .tree import (
    LevelView,
    build_tree,
    fit_representatives,
    level_views,
    per_instance_matrix,
    select_level,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)

BUILTIN_SPECS = {
    "builtin:linear": "linear",
    "builtin:piecewise": "piecewise_linear",
    "builtin:sine": "additive_sine",
}
ALL_METHODS = ("mame", "two_step", "sp_lime", "lime")


def _fail(message: str) -> None:
    sys.stderr.write(json.dumps({"error": message}) + "\n")
    sys.exit(1)


def _guard(fn):
    """Run a command body; convert any failure into the one-line error contract."""

    def wrapper(**kwargs):
        try:
            fn(**kwargs)
        except SystemExit:
            raise
        except (MameError, ValueError, OSError, KeyError) as exc:
            _fail(str(exc) or exc.__class__.__name__)

    wrapper.__name__ = fn.__name__
    return wrapper


def _canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _resolve_oracle(spec: str, p: int, seed: int, timeout_ms: int, batch: int):
    if spec in BUILTIN_SPECS:
        return make_synthetic_blackbox(BUILTIN_SPECS[spec], p, seed)
    if spec.startswith(("http:", "https:")):
        url = "" if spec in ("http:", "https:") else spec
        return make_remote_oracle(
            url, p, timeout_ms=timeout_ms, batch_size=batch
        )
    raise MameError(
        f"unknown oracle spec {spec!r}; expected one of "
        f"{sorted(BUILTIN_SPECS)} or an http(s) URL"
    )


def _drop_target(d: Dataset, target_col: str | None) -> Dataset:
    if target_col is None:
        return d
    if target_col in d.feature_names:
        j = d.feature_names.index(target_col)
    else:
        try:
            j = int(target_col)
        except ValueError:
            raise MameError(
                f"target column {target_col!r} not found"
            ) from None
        if not 0 <= j < d.p:
            raise MameError(f"target column index {j} out of range")
    keep = [c for c in range(d.p) if c != j]
    return Dataset(
        X=d.X[:, keep],
        feature_names=tuple(d.feature_names[c] for c in keep),
        feature_kind=tuple(d.feature_kind[c] for c in keep),
        row_ids=d.row_ids,
    )


def _config_options(fn):
    opts = [
        click.option("--rho", type=float, default=2.0, show_default=True),
        click.option("--t", "t_step", type=float, default=1.01, show_default=True),
        click.option("--epsilon", type=float, default=1e-10, show_default=True),
        click.option("--tau", type=float, default=1e-6, show_default=True),
        click.option("--tol", type=float, default=1e-6, show_default=True),
        click.option("--cg-iters", type=int, default=10, show_default=True),
        click.option("--m", "m_size", type=int, default=10, show_default=True,
                     help="Neighborhood size per instance."),
        click.option("--k-sparsity", type=int, default=5, show_default=True,
                     help="Target nonzeros per explanation."),
        click.option("--seed", type=int, default=0, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _data_options(fn):
    opts = [
        click.option("--data", "data_path", required=True,
                     type=click.Path(exists=True, dir_okay=False)),
        click.option("--target-col", default=None,
                     help="Column (name or index) to drop before explaining."),
        click.option("--no-header", is_flag=True, default=False),
        click.option("--kinds", default=None,
                     help="Comma list of continuous|categorical per column."),
        click.option("--oracle", "oracle_spec", required=True,
                     help="builtin:linear|builtin:piecewise|builtin:sine|http:URL"),
        click.option("--oracle-timeout-ms", type=int, default=10_000),
        click.option("--oracle-batch-size", type=int, default=256),
        click.option("--side-info", default=None,
                     type=click.Path(exists=True, dir_okay=False)),
        click.option("--train-frac", type=float, default=0.75, show_default=True),
        click.option("--zscore", is_flag=True, default=False,
                     help="Fit explanations on standardized coordinates."),
        click.option("--kernel-width", type=float, default=None,
                     help="Gaussian kernel width (default 0.75*sqrt(p))."),
        click.option("--flip-prob", type=float, default=DEFAULT_FLIP_PROB,
                     show_default=True,
                     help="Categorical resample probability."),
        click.option("--threads", type=int, default=os.cpu_count(),
                     help="Degree of parallelism for per-instance fits."),
        click.option("--out-dir", default="mame_out", show_default=True,
                     type=click.Path(file_okay=False)),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _manifest_from_params(command: str, params: dict) -> dict:
    clean = {
        key: value
        for key, value in sorted(params.items())
        if not isinstance(value, (np.ndarray,))
    }
    return {
        "command": command,
        "version": __version__,
        "config": clean,
    }


class Pipeline:
    """Shared preparation: data, split, neighborhoods, leaves, prior graph."""

    def __init__(self, params: dict):
        self.params = params
        cfg = RunConfig(
            rho=params["rho"],
            t=params["t_step"],
            epsilon=params["epsilon"],
            tau=params["tau"],
            tol=params["tol"],
            cg_iters=params["cg_iters"],
            neighborhood_size=params["m_size"],
            target_nonzeros=params["k_sparsity"],
            seed=params["seed"],
        )
        kinds = None
        if params.get("kinds"):
            kinds = [k.strip() for k in params["kinds"].split(",")]
        dataset = load_csv(
            params["data_path"],
            has_header=not params["no_header"],
            kinds=kinds,
        )
        dataset = _drop_target(dataset, params.get("target_col"))
        split = split_dataset(dataset, params["train_frac"], cfg.seed)
        stats = feature_stats(dataset, split.train_idx)
        coord_map = (
            CoordinateMap.zscore(stats, dataset.feature_kind)
            if params["zscore"]
            else CoordinateMap.identity(dataset.p)
        )
        oracle = _resolve_oracle(
            params["oracle_spec"],
            dataset.p,
            cfg.seed,
            params["oracle_timeout_ms"],
            params["oracle_batch_size"],
        )
        kernel = (
            KernelConfig(params["kernel_width"])
            if params.get("kernel_width")
            else KernelConfig.default(dataset.p)
        )
        nbhds = build_neighborhoods(
            dataset, stats, oracle, coord_map, cfg, split.train_idx,
            kernel=kernel, flip_prob=params["flip_prob"],
        )
        threads = max(1, int(params.get("threads") or 1))
        leaf = fit_leaves(nbhds, cfg.target_nonzeros, n_jobs=threads)
        f_train = predict_batch(oracle, dataset.X[split.train_idx])
        if params.get("side_info"):
            graph = load_side_info(params["side_info"], len(split.train_idx))
        else:
            graph = prediction_chain_graph(f_train)

        self.cfg = cfg
        self.dataset = dataset
        self.split = split
        self.stats = stats
        self.coord_map = coord_map
        self.oracle = oracle
        self.kernel = kernel
        self.nbhds = nbhds
        self.leaf = leaf
        self.graph = graph
        self.threads = threads
        self.f_train = f_train

    @property
    def X_train(self) -> np.ndarray:
        return self.dataset.X[self.split.train_idx]

    @property
    def X_test(self) -> np.ndarray:
        return self.dataset.X[self.split.test_idx]

    def manifest(self, command: str) -> dict:
        out = _manifest_from_params(command, self.params)
        out["oracle_resolved"] = json.loads(oracle_to_json(self.oracle))
        out["n_train"] = int(len(self.split.train_idx))
        out["n_test"] = int(len(self.split.test_idx))
        out["p"] = int(self.dataset.p)
        out["backend"] = solver_backend_name()
        return out


def _build_mame_tree(pipe: Pipeline, exact: bool, rep_k: int | None):
    cfg = pipe.cfg
    if exact:
        probe = run_ar_path(pipe.nbhds, pipe.graph, pipe.leaf, cfg)
        grid = [lv.beta for lv in probe.levels]
        path = run_exact_path(pipe.nbhds, pipe.graph, pipe.leaf, cfg, grid)
    else:
        path = run_ar_path(pipe.nbhds, pipe.graph, pipe.leaf, cfg)
    tree = build_tree(path.merge_events, len(pipe.nbhds))
    fit_representatives(
        tree,
        pipe.nbhds,
        pipe.leaf,
        rep_k if rep_k is not None else cfg.target_nonzeros,
        n_jobs=pipe.threads,
    )
    return path, tree


def _path_csv(path) -> str:
    lines = ["k,beta,components,wall_ms"]
    for lv, secs in zip(path.levels, path.wall_times):
        lines.append(
            f"{lv.k},{lv.beta!r},{lv.components},{secs * 1e3:.3f}"
        )
    return "\n".join(lines) + "\n"


@click.group()
@click.version_option(version=__version__)
def main():
    """Multilevel explanation trees for black-box tabular models."""


@main.command("explain")
@_data_options
@_config_options
@_guard
def cmd_explain(**params):
    """Fit only the per-instance leaf explanations and write them out."""
    pipe = Pipeline(params)
    out = Path(params["out_dir"])
    names = list(pipe.dataset.feature_names)
    payload = {
        "feature_names": names,
        "train_idx": [int(i) for i in pipe.split.train_idx],
        "alpha": [float(a) for a in pipe.leaf.alpha],
        "nnz": [int(k) for k in pipe.leaf.nnz],
        "theta": [[float(v) for v in col] for col in pipe.leaf.theta0.T],
    }
    _write(out / "explanations.json", _canonical_json(payload))
    rows = ["train_pos,row_id,alpha,nnz," + ",".join(names)]
    for pos, row in enumerate(pipe.split.train_idx):
        coefs = ",".join(repr(float(v)) for v in pipe.leaf.theta0[:, pos])
        rows.append(
            f"{pos},{pipe.dataset.row_ids[row]},"
            f"{pipe.leaf.alpha[pos]!r},{pipe.leaf.nnz[pos]},{coefs}"
        )
    _write(out / "explanations.csv", "\n".join(rows) + "\n")
    _write(out / "run_manifest.json", _canonical_json(pipe.manifest("explain")))
    click.echo(
        f"explain: n_train={len(pipe.nbhds)} p={pipe.dataset.p} "
        f"-> {out / 'explanations.json'}"
    )


@main.command("tree")
@_data_options
@_config_options
@click.option("--exact", is_flag=True, default=False,
              help="Solve every level to convergence instead of one sweep.")
@click.option("--rep-k", type=int, default=None,
              help="Sparsity target for node representatives (default: --k-sparsity).")
@click.option("--dot", "write_dot", is_flag=True, default=False)
@click.option("--from-manifest", "manifest_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Re-run with the configuration stored in a manifest.")
@_guard
def cmd_tree(**params):
    """Build the multilevel explanation tree and write tree.json/path.csv."""
    manifest_path = params.pop("manifest_path", None)
    if manifest_path:
        stored = json.loads(Path(manifest_path).read_text())["config"]
        stored.pop("manifest_path", None)
        for key, value in stored.items():
            if key in params:
                params[key] = value
    exact = params.pop("exact")
    rep_k = params.pop("rep_k")
    write_dot = params.pop("write_dot")
    pipe = Pipeline(params)
    out = Path(params["out_dir"])
    path, tree = _build_mame_tree(pipe, exact, rep_k)
    _write(out / "tree.json",
           tree_to_json(tree, pipe.dataset.feature_names, pipe.dataset.p))
    if write_dot:
        _write(out / "tree.dot", tree_to_dot(tree, pipe.dataset.feature_names))
    _write(out / "path.csv", _path_csv(path))
    manifest = pipe.manifest("tree")
    manifest["config"]["exact"] = exact
    manifest["config"]["rep_k"] = rep_k
    manifest["config"]["write_dot"] = write_dot
    _write(out / "run_manifest.json", _canonical_json(manifest))
    click.echo(
        f"tree: n={tree.n} p={pipe.dataset.p} levels={len(path.levels)} "
        f"internal_nodes={len(tree.nodes) - tree.n} roots={len(tree.roots)} "
        f"-> {out / 'tree.json'}"
    )


def _views_for_clusters(tree, requested: int | None):
    if requested is None:
        return level_views(tree)
    return [select_level(tree, requested)]


def _sp_lime_views(leaf, counts) -> list[LevelView]:
    views = []
    selection = sp_lime_pick(leaf, max(counts))
    for count in counts:
        chosen = selection.chosen[:count]
        clusters = tuple(
            ((int(i),), leaf.theta0[:, i].copy()) for i in sorted(chosen)
        )
        views.append(
            LevelView(
                requested_clusters=count,
                cluster_count=count,
                level_k=count,
                beta=0.0,
                node_ids=tuple(sorted(chosen)),
                clusters=clusters,
                skipped=False,
            )
        )
    return views


def _eval_outputs(pipe: Pipeline, tree, methods, clusters, out: Path):
    fz_test = predict_batch(pipe.oracle, pipe.X_test)
    rows = ["method,level,clusters,r2"]
    records = []
    importance_by_method = {}

    def add_curve(method, views):
        for view in views:
            point = fidelity_at_view(
                view, pipe.coord_map, pipe.X_test, pipe.X_train, fz_test
            )
            rows.append(
                f"{method},{view.level_k},{point.clusters},{point.r_squared!r}"
            )
            records.append(
                {
                    "method": method,
                    "level": view.level_k,
                    "clusters": point.clusters,
                    "r2": None if point.undefined else point.r_squared,
                    "undefined": point.undefined,
                }
            )

    if "mame" in methods:
        if tree is None:
            raise MameError("mame method requested but no tree artifact found")
        views = _views_for_clusters(tree, clusters)
        add_curve("mame", views)
        importance_by_method["mame"] = feature_importance_multilevel(
            [tree_level_matrix(tree, v) for v in level_views(tree)]
        )
    ts_tree = None
    if "two_step" in methods:
        ts = two_step_path(pipe.leaf, pipe.graph, pipe.cfg)
        ts_tree = two_step_medians(ts, pipe.leaf)
        add_curve("two_step", _views_for_clusters(ts_tree, clusters))
        importance_by_method["two_step"] = feature_importance_multilevel(
            [tree_level_matrix(ts_tree, v) for v in level_views(ts_tree)]
        )
    if "sp_lime" in methods:
        n = len(pipe.nbhds)
        counts = [clusters] if clusters else list(range(1, n + 1))
        add_curve("sp_lime", _sp_lime_views(pipe.leaf, counts))
    if "lime" in methods:
        leaf_view = LevelView(
            requested_clusters=len(pipe.nbhds),
            cluster_count=len(pipe.nbhds),
            level_k=0,
            beta=0.0,
            node_ids=tuple(range(len(pipe.nbhds))),
            clusters=tuple(
                ((i,), pipe.leaf.theta0[:, i].copy())
                for i in range(len(pipe.nbhds))
            ),
            skipped=False,
        )
        add_curve("lime", [leaf_view])
        importance_by_method["lime"] = feature_importance(pipe.leaf.theta0)

    _write(out / "fidelity.csv", "\n".join(rows) + "\n")
    _write(out / "fidelity.json", _canonical_json({"points": records}))

    blackbox = pipe.oracle.feature_importance()
    correlations = {}
    for method, imp in sorted(importance_by_method.items()):
        if blackbox is None:
            correlations[method] = None
        else:
            correlations[method] = kendall_tau(
                importance_ranks(imp), importance_ranks(blackbox)
            )
    payload = {
        "blackbox_importance_available": blackbox is not None,
        "kendall_tau_b": correlations,
        "importance": {
            method: [float(v) for v in imp]
            for method, imp in sorted(importance_by_method.items())
        },
    }
    _write(out / "rank_correlation.json", _canonical_json(payload))
    return len(rows) - 1


def tree_level_matrix(tree, view: LevelView) -> np.ndarray:
    p = next(len(t) for _, t in view.clusters if t is not None)
    return per_instance_matrix(view, p, tree.n)


@main.command("eval")
@click.option("--run-dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory holding run_manifest.json and tree.json.")
@click.option("--methods", default="mame,two_step,sp_lime,lime",
              show_default=True)
@click.option("--clusters", type=int, default=None,
              help="Report a single level with this many clusters.")
@click.option("--out-dir", default=None,
              help="Output directory (default: the run directory).")
@_guard
def cmd_eval(**params):
    """Score fidelity and rank correlation for a finished tree run."""
    run_dir = Path(params["run_dir"])
    manifest_file = run_dir / "run_manifest.json"
    if not manifest_file.exists():
        raise MameError(f"missing artifact: {manifest_file}")
    stored = json.loads(manifest_file.read_text())["config"]
    for key in ("exact", "rep_k", "write_dot", "manifest_path"):
        stored.pop(key, None)
    methods = tuple(m.strip() for m in params["methods"].split(",") if m.strip())
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad:
        raise MameError(
            f"unknown methods {bad}; valid methods: {', '.join(ALL_METHODS)}"
        )
    pipe = Pipeline(stored)
    tree = None
    tree_file = run_dir / "tree.json"
    if tree_file.exists():
        tree, _, _ = tree_from_json(tree_file.read_text())
    elif "mame" in methods:
        raise MameError(f"missing artifact: {tree_file}")
    out = Path(params["out_dir"] or run_dir)
    n_rows = _eval_outputs(pipe, tree, methods, params["clusters"], out)
    click.echo(
        f"eval: methods={','.join(methods)} rows={n_rows} "
        f"-> {out / 'fidelity.csv'}"
    )


@main.command("compare")
@_data_options
@_config_options
@click.option("--methods", default="mame,two_step,sp_lime,lime",
              show_default=True)
@click.option("--clusters", type=int, default=None)
@click.option("--rep-k", type=int, default=None)
@_guard
def cmd_compare(**params):
    """End-to-end: build the tree, run all baselines, write all metrics."""
    methods = tuple(
        m.strip() for m in params.pop("methods").split(",") if m.strip()
    )
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad:
        raise MameError(
            f"unknown methods {bad}; valid methods: {', '.join(ALL_METHODS)}"
        )
    clusters = params.pop("clusters")
    rep_k = params.pop("rep_k")
    pipe = Pipeline(params)
    out = Path(params["out_dir"])
    tree = None
    if "mame" in methods:
        path, tree = _build_mame_tree(pipe, exact=False, rep_k=rep_k)
        _write(out / "tree.json",
               tree_to_json(tree, pipe.dataset.feature_names, pipe.dataset.p))
        _write(out / "path.csv", _path_csv(path))
    n_rows = _eval_outputs(pipe, tree, methods, clusters, out)
    manifest = pipe.manifest("compare")
    manifest["config"]["rep_k"] = rep_k
    manifest["config"]["clusters"] = clusters
    manifest["config"]["methods"] = list(methods)
    _write(out / "run_manifest.json", _canonical_json(manifest))
    click.echo(
        f"compare: methods={','.join(methods)} rows={n_rows} -> {out}"
    )


@main.command("ar-study")
@click.option("--n", "n_rows", type=int, default=30, show_default=True)
@click.option("--p", "p_cols", type=int, default=4, show_default=True)
@click.option("--oracle", "oracle_spec", default="builtin:sine",
              show_default=True)
@click.option("--t", "t_values", multiple=True, type=float,
              help="Step sizes (repeatable; default the 7-point grid).")
@click.option("--epsilon", type=float, default=1e-10, show_default=True)
@click.option("--exact-cap", type=int, default=60, show_default=True,
              help="Largest fixture size the exact solver will accept.")
@click.option("--rho", type=float, default=2.0, show_default=True)
@click.option("--tau", type=float, default=1e-6, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--cg-iters", type=int, default=10, show_default=True)
@click.option("--m", "m_size", type=int, default=10, show_default=True)
@click.option("--k-sparsity", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", default="mame_out", show_default=True,
              type=click.Path(file_okay=False))
@_guard
def cmd_ar_study(**params):
    """Fast-vs-exact distance and timing over a grid of step sizes."""
    n, p = params["n_rows"], params["p_cols"]
    if n > params["exact_cap"]:
        raise MameError(
            f"fixture n={n} exceeds --exact-cap={params['exact_cap']}; "
            "the exact solver is meant for desk-scale fixtures"
        )
    if params["oracle_spec"] not in BUILTIN_SPECS:
        raise MameError("ar-study supports built-in oracles only")
    cfg = RunConfig(
        rho=params["rho"],
        epsilon=params["epsilon"],
        tau=params["tau"],
        tol=params["tol"],
        cg_iters=params["cg_iters"],
        neighborhood_size=params["m_size"],
        target_nonzeros=params["k_sparsity"],
        seed=params["seed"],
    )
    t_grid = list(params["t_values"]) or [1.01, 1.05, 1.1, 1.2, 1.3, 1.4, 1.5]
    nbhds, graph, leaf, _ = synthetic_fixture(
        n, p, BUILTIN_SPECS[params["oracle_spec"]], cfg
    )
    started = time.perf_counter()
    report = ar_exact_study(
        nbhds, graph, leaf, cfg, t_grid, params["epsilon"]
    )
    out = Path(params["out_dir"])
    payload = {
        "t_grid": list(report.t_grid),
        "normalized_distance": list(report.normalized_distance),
        "ar_seconds": list(report.ar_seconds),
        "exact_seconds": list(report.exact_seconds),
        "fixture": {"n": n, "p": p, "oracle": params["oracle_spec"],
                    "seed": cfg.seed},
    }
    _write(out / "ar_study.json", _canonical_json(payload))
    lines = ["t,normalized_distance,ar_seconds,exact_seconds"]
    for t, dist, ar_s, ex_s in report.rows():
        lines.append(f"{t!r},{dist!r},{ar_s:.6f},{ex_s:.6f}")
    _write(out / "ar_study.csv", "\n".join(lines) + "\n")
    manifest = _manifest_from_params("ar-study", params)
    _write(out / "run_manifest.json", _canonical_json(manifest))
    click.echo(
        f"ar-study: rows={len(report.t_grid)} "
        f"wall={time.perf_counter() - started:.1f}s -> {out / 'ar_study.json'}"
    )


def synthetic_fixture(n: int, p: int, kind: str, cfg: RunConfig):
    """Seeded in-memory fixture: dataset, chain graph, neighborhoods, leaves."""
    rng = np.random.default_rng(cfg.seed)
    X = rng.normal(0.0, 1.0, (n, p))
    dataset = Dataset(
        X=X,
        feature_names=tuple(f"f{j}" for j in range(p)),
        feature_kind=tuple(["continuous"] * p),
        row_ids=tuple(str(i) for i in range(n)),
    )
    oracle = make_synthetic_blackbox(kind, p, cfg.seed)
    stats = feature_stats(dataset, np.arange(n))
    coord_map = CoordinateMap.identity(p)
    nbhds = build_neighborhoods(
        dataset, stats, oracle, coord_map, cfg, np.arange(n)
    )
    leaf = fit_leaves(nbhds, cfg.target_nonzeros)
    graph = prediction_chain_graph(predict_batch(oracle, X))
    return nbhds, graph, leaf, oracle


if __name__ == "__main__":
    main()
