"""Merge tracking, multilevel tree recovery, and representative explanations.

A path run emits MergeEvents (edge endpoints whose auxiliary difference
column dropped below the grouping threshold while still in distinct
clusters). Replaying those events builds the dendrogram: one internal node
per connected group of components consumed at the same level. Every node
then gets a representative explanation: leaves reuse their leaf fits;
internal nodes fit a single tied coefficient vector over the pooled member
neighborhoods.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import groupby

import numpy as np

from .lasso import LeafFit, fit_sparsity_target, neighborhood_quad, pooled_quad


class DisjointSet:
    """Union-find with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.component_count = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        self.component_count -= 1
        return True


@dataclass(frozen=True)
class MergeEvent:
    k: int
    beta: float
    i: int
    j: int


def record_merge(
    ds: DisjointSet, i: int, j: int, k: int, beta: float
) -> MergeEvent | None:
    """Union i and j if they are in distinct clusters; emit the event if so."""
    if ds.union(i, j):
        return MergeEvent(k=k, beta=float(beta), i=int(i), j=int(j))
    return None


@dataclass
class TreeNode:
    id: int
    members: tuple[int, ...]
    level_k: int
    beta: float
    children: tuple[int, ...]
    theta_rep: np.ndarray | None = None


@dataclass(frozen=True)
class TreeLevel:
    """Active clusters right after the merges of one path level."""

    level_k: int
    beta: float
    component_count: int
    active_nodes: tuple[int, ...]


@dataclass
class ExplanationTree:
    n: int
    nodes: list[TreeNode]
    roots: tuple[int, ...]
    levels: list[TreeLevel] = field(default_factory=list)

    @property
    def leaves(self) -> range:
        return range(self.n)

    def node_members(self, node_id: int) -> tuple[int, ...]:
        return self.nodes[node_id].members

    def validate(self) -> None:
        """Dendrogram sanity: parents partition exactly their children."""
        for node in self.nodes[self.n :]:
            merged: list[int] = []
            for child in node.children:
                merged.extend(self.nodes[child].members)
            if sorted(merged) != list(node.members):
                raise AssertionError(
                    f"node {node.id} members are not the disjoint union of "
                    "its children"
                )
        covered = sorted(m for r in self.roots for m in self.nodes[r].members)
        if covered != list(range(self.n)):
            raise AssertionError("roots do not partition the leaf set")


@dataclass(frozen=True)
class LevelView:
    """Clusters (member sets plus representatives) at one tree level."""

    requested_clusters: int
    cluster_count: int
    level_k: int
    beta: float
    node_ids: tuple[int, ...]
    clusters: tuple[tuple[tuple[int, ...], np.ndarray | None], ...]
    skipped: bool


def build_tree(events: list[MergeEvent], n: int) -> ExplanationTree:
    """Replay merge events into a dendrogram (no representatives yet).

    Events must come in nondecreasing level order. Simultaneous merges at one
    level form one tree level; chained merges there collapse into a single
    new node whose children are every component consumed.
    """
    if any(b.k < a.k for a, b in zip(events, events[1:])):
        raise ValueError("merge events must be in nondecreasing level order")
    nodes = [
        TreeNode(id=i, members=(i,), level_k=0, beta=0.0, children=())
        for i in range(n)
    ]
    ds = DisjointSet(n)
    node_of_root: dict[int, int] = {i: i for i in range(n)}
    levels: list[TreeLevel] = []

    for k, evs in groupby(events, key=lambda e: e.k):
        evs = list(evs)
        beta = evs[0].beta
        consumed: dict[int, set[int]] = {}  # current root -> node ids merged in
        for ev in evs:
            if not (0 <= ev.i < n and 0 <= ev.j < n):
                raise ValueError(f"merge event references out-of-range index: {ev}")
            ra, rb = ds.find(ev.i), ds.find(ev.j)
            if ra == rb:
                continue
            group = consumed.pop(ra, {node_of_root[ra]})
            group |= consumed.pop(rb, {node_of_root[rb]})
            ds.union(ra, rb)
            consumed[ds.find(ra)] = group
        for root, child_ids in consumed.items():
            children = tuple(
                sorted(child_ids, key=lambda c: nodes[c].members[0])
            )
            members = tuple(
                sorted(m for c in children for m in nodes[c].members)
            )
            new = TreeNode(
                id=len(nodes),
                members=members,
                level_k=k,
                beta=float(beta),
                children=children,
            )
            nodes.append(new)
            node_of_root[root] = new.id
        active = tuple(
            sorted({node_of_root[ds.find(i)] for i in range(n)})
        )
        levels.append(
            TreeLevel(
                level_k=k,
                beta=float(beta),
                component_count=ds.component_count,
                active_nodes=active,
            )
        )

    roots = tuple(sorted({node_of_root[ds.find(i)] for i in range(n)}))
    tree = ExplanationTree(n=n, nodes=nodes, roots=roots, levels=levels)
    tree.validate()
    return tree


def fit_representatives(
    tree: ExplanationTree,
    nbhds,
    leaf: LeafFit,
    target_k: int,
    n_jobs: int = 1,
) -> ExplanationTree:
    """Attach a tied sparse explanation to every node, in place.

    Each internal node minimizes the pooled weighted surrogate loss over all
    member neighborhoods with one shared coefficient vector, alpha targeted
    at `target_k` nonzeros exactly as in the leaf fits. Leaves reuse their
    leaf explanations unchanged.
    """
    if len(nbhds) != tree.n:
        raise ValueError("need one neighborhood per leaf")
    quads = [neighborhood_quad(nb) for nb in nbhds]
    for i in range(tree.n):
        tree.nodes[i].theta_rep = leaf.theta0[:, i].copy()
    internal = tree.nodes[tree.n :]

    def fit_node(node: TreeNode) -> np.ndarray:
        if not node.members:
            raise ValueError(f"node {node.id} has no members")
        q = pooled_quad(quads[m] for m in node.members)
        theta, _, _ = fit_sparsity_target(q.Q, q.c, target_k)
        return theta

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            thetas = list(pool.map(fit_node, internal))
    else:
        thetas = [fit_node(node) for node in internal]
    for node, theta in zip(internal, thetas):
        node.theta_rep = theta
    return tree


def median_representatives(
    tree: ExplanationTree, omega: np.ndarray
) -> ExplanationTree:
    """Coordinate-wise median of member leaf explanations per node, in place.

    Even-sized groups take the midpoint of the two middle values.
    """
    for node in tree.nodes:
        node.theta_rep = np.median(omega[:, list(node.members)], axis=1)
    return tree


def select_level(tree: ExplanationTree, cluster_count: int) -> LevelView:
    """View at the latest level whose component count equals the request.

    Simultaneous merges can skip counts; the nearest smaller available count
    is returned then, flagged via `skipped`.
    """
    if not 1 <= cluster_count <= tree.n:
        raise ValueError(
            f"cluster_count must be in [1, {tree.n}], got {cluster_count}"
        )
    leaf_level = TreeLevel(
        level_k=0,
        beta=0.0,
        component_count=tree.n,
        active_nodes=tuple(range(tree.n)),
    )
    sequence = [leaf_level] + list(tree.levels)
    exact = [lv for lv in sequence if lv.component_count == cluster_count]
    if exact:
        chosen, skipped = exact[-1], False
    else:
        smaller = [lv for lv in sequence if lv.component_count < cluster_count]
        if not smaller:
            raise ValueError(
                f"no level has {cluster_count} or fewer clusters "
                f"(minimum reached: {sequence[-1].component_count})"
            )
        chosen, skipped = smaller[0], True
    clusters = tuple(
        (tree.nodes[nid].members, tree.nodes[nid].theta_rep)
        for nid in chosen.active_nodes
    )
    return LevelView(
        requested_clusters=cluster_count,
        cluster_count=chosen.component_count,
        level_k=chosen.level_k,
        beta=chosen.beta,
        node_ids=chosen.active_nodes,
        clusters=clusters,
        skipped=skipped,
    )


def level_views(tree: ExplanationTree) -> list[LevelView]:
    """One view per distinct component count, from n down to the root count."""
    counts = [tree.n] + [lv.component_count for lv in tree.levels]
    out = []
    for c in sorted(set(counts), reverse=True):
        out.append(select_level(tree, c))
    return out


def per_instance_matrix(view: LevelView, p: int, n: int) -> np.ndarray:
    """(p, n) matrix assigning each instance its cluster representative."""
    out = np.full((p, n), np.nan)
    for members, theta in view.clusters:
        if theta is None:
            raise ValueError("level view has no representatives fitted")
        for m in members:
            out[:, m] = theta
    return out


def tree_to_json(tree: ExplanationTree, feature_names, p: int) -> str:
    """Canonical JSON export (sorted keys, round-trippable floats)."""
    payload = {
        "n": tree.n,
        "p": p,
        "feature_names": list(feature_names),
        "roots": list(tree.roots),
        "nodes": [
            {
                "id": node.id,
                "level_k": node.level_k,
                "beta": node.beta,
                "members": list(node.members),
                "theta": (
                    None
                    if node.theta_rep is None
                    else [float(v) for v in node.theta_rep]
                ),
                "children": list(node.children),
            }
            for node in tree.nodes
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1)


def tree_from_json(text: str) -> tuple[ExplanationTree, list[str], int]:
    """Inverse of tree_to_json; levels are rebuilt from node metadata."""
    payload = json.loads(text)
    nodes = [
        TreeNode(
            id=nd["id"],
            members=tuple(nd["members"]),
            level_k=nd["level_k"],
            beta=nd["beta"],
            children=tuple(nd["children"]),
            theta_rep=None if nd["theta"] is None else np.array(nd["theta"]),
        )
        for nd in sorted(payload["nodes"], key=lambda nd: nd["id"])
    ]
    n = payload["n"]
    tree = ExplanationTree(
        n=n, nodes=nodes, roots=tuple(payload["roots"]), levels=[]
    )
    # Reconstruct the level sequence by replaying internal nodes in id order.
    active = set(range(n))
    for k, group in groupby(nodes[n:], key=lambda nd: nd.level_k):
        group = list(group)
        for node in group:
            active -= set(node.children)
            active.add(node.id)
        tree.levels.append(
            TreeLevel(
                level_k=k,
                beta=group[0].beta,
                component_count=len(active),
                active_nodes=tuple(sorted(active)),
            )
        )
    tree.validate()
    return tree, list(payload["feature_names"]), payload["p"]


def tree_to_dot(tree: ExplanationTree, feature_names) -> str:
    """Graphviz export: node id, cluster size, top-3 |theta| features."""
    lines = ["digraph explanation_tree {", "  rankdir=BT;"]
    for node in tree.nodes:
        label = f"#{node.id} size={len(node.members)}"
        if node.theta_rep is not None:
            top = np.argsort(-np.abs(node.theta_rep))[:3]
            pairs = ", ".join(
                f"{feature_names[j]}={node.theta_rep[j]:.3g}"
                for j in top
                if node.theta_rep[j] != 0
            )
            if pairs:
                label += r"\n" + pairs
        lines.append(f'  n{node.id} [label="{label}"];')
    for node in tree.nodes[tree.n :]:
        for child in node.children:
            lines.append(f"  n{child} -> n{node.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"
