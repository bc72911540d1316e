"""Clustering algorithms with the parameter policies used by the harness.

Three algorithms over a shared ``Clustering`` result type:

* k-means (Lloyd iteration) plus an automatic k selector that sweeps
  k in [2, sqrt(n)] and keeps the best silhouette;
* DBSCAN on a precomputed distance matrix, plus a supervised grid search
  over (eps, min_samples) that keeps the best V-measure;
* OPTICS with xi cluster extraction (xi = 0.05).

Noise is the assignment value -1.  ``noise_to_singletons`` converts every
noise point into its own cluster, the retention policy used before scoring:
outliers must stay visible rather than being forced into unrelated clusters.
All algorithms are deterministic given (input, params, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse

from .distance import DistanceMatrix, pairwise
from .tfidf import EmbeddingMatrix

NOISE = -1


@dataclass(eq=False)
class Clustering:
    """Per-document cluster ids; -1 marks noise; ids are dense in [0, k)."""

    assignment: np.ndarray
    n_clusters: int

    def __post_init__(self) -> None:
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        ids = set(np.unique(self.assignment).tolist()) - {NOISE}
        if ids != set(range(self.n_clusters)):
            raise ValueError("cluster ids must be dense in [0, n_clusters)")

    @property
    def n_noise(self) -> int:
        return int((self.assignment == NOISE).sum())


def _canonical(labels: np.ndarray) -> Clustering:
    """Relabel non-noise ids by first appearance; noise stays -1."""
    labels = np.asarray(labels, dtype=np.int64)
    mapping: dict[int, int] = {}
    out = np.full(labels.shape[0], NOISE, dtype=np.int64)
    for i, lab in enumerate(labels.tolist()):
        if lab == NOISE:
            continue
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return Clustering(assignment=out, n_clusters=len(mapping))


@dataclass(frozen=True)
class KMeansParams:
    k: int
    seed: int = 0
    max_iters: int = 300
    n_init: int = 10

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_samples: int

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")


@dataclass(eq=False)
class GridSearchResult:
    best_params: DbscanParams
    best_clustering: Clustering
    best_v: float
    grid_size: int


def _row_normalize(x):
    """L2-normalize rows; zero rows stay zero."""
    if sparse.issparse(x):
        sq = np.asarray(x.multiply(x).sum(axis=1)).ravel()
        norms = np.sqrt(sq)
        scale = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 0.0)
        return sparse.diags(scale) @ x
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    scale = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 0.0)
    return x * scale[:, None]


def _point_centroid_dists(x, centroids: np.ndarray, metric: str) -> np.ndarray:
    """n x k distances between data rows and dense centroid rows."""
    if metric == "euclidean":
        if sparse.issparse(x):
            sq_x = np.asarray(x.multiply(x).sum(axis=1)).ravel()
            cross = x @ centroids.T
        else:
            sq_x = np.einsum("ij,ij->i", x, x)
            cross = x @ centroids.T
        sq_c = np.einsum("ij,ij->i", centroids, centroids)
        d2 = sq_x[:, None] + sq_c[None, :] - 2.0 * np.asarray(cross)
        return np.sqrt(np.maximum(d2, 0.0))
    if metric == "manhattan":
        n = x.shape[0]
        out = np.empty((n, centroids.shape[0]), dtype=np.float64)
        if sparse.issparse(x):
            # sum|x - c| = |c|_1 + sum over nonzeros of (|x_j - c_j| - |c_j|)
            for ci, c in enumerate(centroids):
                contrib = np.abs(x.data - c[x.indices]) - np.abs(c[x.indices])
                cs = np.concatenate(([0.0], np.cumsum(contrib)))
                out[:, ci] = np.abs(c).sum() + (cs[x.indptr[1:]] - cs[x.indptr[:-1]])
        else:
            for ci, c in enumerate(centroids):
                out[:, ci] = np.abs(x - c).sum(axis=1)
        return out
    if metric == "cosine":
        # rows and centroids are pre-normalized by the caller; zero rows give
        # similarity 0, i.e. distance 1, matching the scalar convention.
        sim = np.asarray(x @ centroids.T)
        return np.clip(1.0 - sim, 0.0, 2.0)
    raise ValueError(f"unknown metric {metric!r}")


def _kmeanspp_init(x, k: int, metric: str, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: points sampled proportionally to their squared
    distance from the nearest already-chosen seed."""
    n = x.shape[0]
    first = int(rng.integers(n))
    chosen = [first]
    seed_row = np.asarray(x[[first]].todense() if sparse.issparse(x) else x[[first]])
    closest_sq = _point_centroid_dists(x, seed_row, metric).ravel() ** 2
    for _ in range(k - 1):
        total = float(closest_sq.sum())
        if total > 0.0:
            nxt = int(rng.choice(n, p=closest_sq / total))
        else:
            # everything coincides with a seed; take the first unchosen row
            taken = np.zeros(n, dtype=bool)
            taken[chosen] = True
            nxt = int(np.argmin(taken))
        chosen.append(nxt)
        seed_row = np.asarray(x[[nxt]].todense() if sparse.issparse(x) else x[[nxt]])
        d = _point_centroid_dists(x, seed_row, metric).ravel()
        closest_sq = np.minimum(closest_sq, d**2)
    return np.asarray(
        x[chosen].todense() if sparse.issparse(x) else x[chosen], dtype=np.float64
    )


def _lloyd(x, metric: str, k: int, centroids: np.ndarray, max_iters: int) -> tuple[np.ndarray, float]:
    """One Lloyd run from the given centroids; returns (assignment, cost).

    Cost is the k-means objective under the metric: squared distances for
    euclidean, plain distance sums for manhattan and cosine.
    """
    n = x.shape[0]
    assign: np.ndarray | None = None
    dists = None
    for _ in range(max_iters):
        dists = _point_centroid_dists(x, centroids, metric)
        new_assign = np.argmin(dists, axis=1)
        sizes = np.bincount(new_assign, minlength=k)
        for empty in np.flatnonzero(sizes == 0):
            # reseed with the point farthest from its current centroid
            assigned_d = dists[np.arange(n), new_assign]
            eligible = sizes[new_assign] >= 2
            if not eligible.any():
                break
            cand = int(np.argmax(np.where(eligible, assigned_d, -np.inf)))
            sizes[new_assign[cand]] -= 1
            new_assign[cand] = empty
            sizes[empty] += 1
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        onehot = np.zeros((n, k), dtype=np.float64)
        onehot[np.arange(n), assign] = 1.0
        sums = np.asarray((x.T @ onehot).T)
        sizes = onehot.sum(axis=0)
        centroids = sums / np.maximum(sizes, 1.0)[:, None]
        if metric == "cosine":
            centroids = np.asarray(_row_normalize(centroids))
    assert assign is not None and dists is not None
    final_d = dists[np.arange(n), assign]
    cost = float((final_d**2).sum() if metric == "euclidean" else final_d.sum())
    return assign, cost


def kmeans(matrix: EmbeddingMatrix, metric: str, params: KMeansParams) -> Clustering:
    """k-means under the chosen metric: k-means++ seeding, Lloyd iteration
    until assignments are stable (or max_iters), best of n_init restarts by
    within-cluster cost.

    For cosine, rows and centroids are L2-normalized (spherical k-means).
    An empty cluster is reseeded with the point farthest from its centroid.
    Deterministic for a fixed seed: restarts draw from one seeded RNG and
    ties keep the earliest restart.
    """
    n = matrix.n_rows
    if params.k > n:
        raise ValueError(f"k={params.k} exceeds corpus size {n}")
    x = matrix.data
    if metric == "cosine":
        x = _row_normalize(x)
        if sparse.issparse(x):
            x = x.tocsr()
    rng = np.random.default_rng(params.seed)
    best_assign: np.ndarray | None = None
    best_cost = np.inf
    for _ in range(params.n_init):
        centroids = _kmeanspp_init(x, params.k, metric, rng)
        if metric == "cosine":
            centroids = np.asarray(_row_normalize(centroids))
        assign, cost = _lloyd(x, metric, params.k, centroids, params.max_iters)
        if cost < best_cost:
            best_cost = cost
            best_assign = assign
    assert best_assign is not None
    return _canonical(best_assign)


def silhouette(dm: DistanceMatrix, clustering: Clustering) -> float:
    """Mean silhouette score on a precomputed distance matrix.

    a(i) is the mean intra-cluster distance (excluding self), b(i) the lowest
    mean distance to another cluster.  Singleton points score 0, and so do
    points with a = b = 0.
    """
    labels = clustering.assignment
    k = clustering.n_clusters
    if k < 2:
        raise ValueError("silhouette requires at least 2 clusters")
    if (labels == NOISE).any():
        raise ValueError("silhouette is undefined with noise points")
    n = dm.n
    onehot = np.zeros((n, k), dtype=np.float64)
    onehot[np.arange(n), labels] = 1.0
    sums = dm.values @ onehot
    sizes = onehot.sum(axis=0)
    own = sums[np.arange(n), labels]
    own_size = sizes[labels]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(own_size > 1, own / np.maximum(own_size - 1, 1), 0.0)
    other = sums / sizes[None, :]
    other[np.arange(n), labels] = np.inf
    b = other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    s = np.where(own_size == 1, 0.0, s)
    return float(s.mean())


def auto_kmeans(
    matrix: EmbeddingMatrix,
    metric: str,
    seed: int = 0,
    dm: DistanceMatrix | None = None,
) -> Clustering:
    """k-means with automatic k: sweep k in [2, floor(sqrt(n))], keep the
    clustering with the best silhouette; ties go to the smaller k."""
    n = matrix.n_rows
    if n < 4:
        raise ValueError("automatic k selection needs at least 4 documents")
    if dm is None:
        dm = pairwise(matrix, metric)
    elif dm.metric != metric:
        raise ValueError(f"distance matrix is {dm.metric!r}, expected {metric!r}")
    best: Clustering | None = None
    best_score = -np.inf
    for k in range(2, math.isqrt(n) + 1):
        clustering = kmeans(matrix, metric, KMeansParams(k=k, seed=seed))
        if clustering.n_clusters < 2:
            continue
        s = silhouette(dm, clustering)
        if s > best_score:
            best_score = s
            best = clustering
    assert best is not None
    return best


def _core_components(adjacency: np.ndarray, core: np.ndarray) -> np.ndarray:
    """Connected components of core points under the adjacency relation,
    grown by vectorized breadth-first expansion; -1 elsewhere."""
    n = adjacency.shape[0]
    comp = np.full(n, -1, dtype=np.int64)
    unvisited = core.copy()
    cid = 0
    while True:
        seeds = np.flatnonzero(unvisited)
        if not seeds.size:
            break
        member = np.zeros(n, dtype=bool)
        member[seeds[0]] = True
        frontier = member.copy()
        while frontier.any():
            reach = adjacency[frontier].any(axis=0) & core & ~member
            member |= reach
            frontier = reach
        comp[member] = cid
        unvisited &= ~member
        cid += 1
    return comp


def _dbscan_with_adjacency(adjacency: np.ndarray, degrees: np.ndarray, min_samples: int) -> Clustering:
    n = adjacency.shape[0]
    labels = np.full(n, NOISE, dtype=np.int64)
    core = degrees >= min_samples
    if not core.any():
        return Clustering(assignment=labels, n_clusters=0)
    comp = _core_components(adjacency, core)
    labels[core] = comp[core]
    core_idx = np.flatnonzero(core)
    noncore_idx = np.flatnonzero(~core)
    if noncore_idx.size:
        reach = adjacency[np.ix_(noncore_idx, core_idx)]
        attached = reach.any(axis=1)
        first_core = reach.argmax(axis=1)
        labels[noncore_idx[attached]] = comp[core_idx[first_core[attached]]]
    return _canonical(labels)


def dbscan(dm: DistanceMatrix, params: DbscanParams) -> Clustering:
    """DBSCAN on a precomputed distance matrix.

    A point is core iff at least min_samples points (itself included) lie
    within eps.  Clusters are the connected components of core points under
    eps-reachability; border points join the cluster of their lowest-index
    adjacent core point; everything else is noise.
    """
    if dm.n == 0:
        return Clustering(assignment=np.empty(0, dtype=np.int64), n_clusters=0)
    adjacency = dm.values <= params.eps
    degrees = adjacency.sum(axis=1)
    return _dbscan_with_adjacency(adjacency, degrees, params.min_samples)


def default_eps_grid() -> tuple[float, ...]:
    """eps from 0.1 to 3.0 inclusive in steps of 0.1 (30 values)."""
    return tuple(i / 10 for i in range(1, 31))


def default_min_samples_grid(n: int) -> tuple[int, ...]:
    """min_samples 1..floor(sqrt(n))."""
    return tuple(range(1, math.isqrt(n) + 1))


def dbscan_grid(
    dm: DistanceMatrix,
    truth_labels: Sequence[str],
    eps_range: Sequence[float] | None = None,
    ms_range: Sequence[int] | None = None,
    beta: float = 1.0,
) -> GridSearchResult:
    """Supervised DBSCAN parameter search.

    Every (eps, min_samples) cell is evaluated; V is computed after
    noise_to_singletons; ties prefer smaller eps, then smaller min_samples.
    The reduction is order-independent, so cells may be evaluated in any
    order.
    """
    from .metrics import score  # local import: metrics depends on this module

    if len(truth_labels) != dm.n:
        raise ValueError("truth labels and distance matrix size differ")
    if eps_range is None:
        eps_range = default_eps_grid()
    if ms_range is None:
        ms_range = default_min_samples_grid(dm.n)
    best_key: tuple[float, float, int] | None = None
    best: GridSearchResult | None = None
    cells = 0
    for eps in eps_range:
        # one adjacency per eps; only the core threshold varies below
        adjacency = dm.values <= eps
        degrees = adjacency.sum(axis=1)
        for ms in ms_range:
            cells += 1
            clustering = _dbscan_with_adjacency(adjacency, degrees, int(ms))
            v = score(truth_labels, clustering, beta=beta).v
            key = (v, -eps, -int(ms))
            if best_key is None or key > best_key:
                best_key = key
                best = GridSearchResult(
                    best_params=DbscanParams(eps=eps, min_samples=int(ms)),
                    best_clustering=clustering,
                    best_v=v,
                    grid_size=0,
                )
    assert best is not None
    best.grid_size = cells
    return best


def optics(dm: DistanceMatrix, min_samples: int = 2, xi: float = 0.05) -> Clustering:
    """OPTICS ordering plus xi cluster extraction.

    Core distance is the distance to the min_samples-th neighbor (self
    included); reachability is max(core distance, pairwise distance),
    expanded in min-reachability order with lowest-index tie breaking.
    Points outside every extracted cluster are noise.
    """
    if min_samples < 2:
        raise ValueError("min_samples must be >= 2")
    dist = dm.values
    n = dist.shape[0]
    if n == 0:
        return Clustering(assignment=np.empty(0, dtype=np.int64), n_clusters=0)
    if n < min_samples:
        return Clustering(assignment=np.full(n, NOISE, dtype=np.int64), n_clusters=0)

    core_dist = np.partition(dist, min_samples - 1, axis=1)[:, min_samples - 1]
    reachability = np.full(n, np.inf)
    predecessor = np.full(n, -1, dtype=np.int64)
    processed = np.zeros(n, dtype=bool)
    ordering = np.zeros(n, dtype=np.int64)
    for step in range(n):
        unprocessed = np.flatnonzero(~processed)
        point = unprocessed[np.argmin(reachability[unprocessed])]
        processed[point] = True
        ordering[step] = point
        if np.isfinite(core_dist[point]):
            targets = np.flatnonzero(~processed)
            if targets.size:
                rdists = np.maximum(dist[point, targets], core_dist[point])
                improved = rdists < reachability[targets]
                reachability[targets[improved]] = rdists[improved]
                predecessor[targets[improved]] = point

    clusters = _xi_cluster(
        reachability[ordering],
        predecessor[ordering],
        ordering,
        xi=xi,
        min_samples=min_samples,
        min_cluster_size=min_samples,
    )
    labels = _extract_xi_labels(ordering, clusters)
    return _canonical(labels)


def _extend_region(steep: np.ndarray, xward: np.ndarray, start: int, min_samples: int) -> int:
    """Extend a steep region; allow at most min_samples consecutive
    non-steep points that still move the right way."""
    n = len(steep)
    non_xward = 0
    index = start
    end = start
    while index < n:
        if steep[index]:
            non_xward = 0
            end = index
        elif not xward[index]:
            non_xward += 1
            if non_xward > min_samples:
                break
        else:
            return end
        index += 1
    return end


def _update_filter_sdas(sdas, mib, xi_complement, reachability_plot):
    if np.isinf(mib):
        return []
    kept = [s for s in sdas if mib <= reachability_plot[s["start"]] * xi_complement]
    for s in kept:
        s["mib"] = max(s["mib"], mib)
    return kept


def _correct_predecessor(reachability_plot, predecessor_plot, ordering, s, e):
    """Shrink a candidate cluster until its last point is reachable from
    inside it (Schubert-Gertz predecessor correction)."""
    while s < e:
        if reachability_plot[s] > reachability_plot[e]:
            return s, e
        p_e = predecessor_plot[e]
        for i in range(s, e):
            if p_e == ordering[i]:
                return s, e
        e -= 1
    return None, None


def _xi_cluster(reachability_plot, predecessor_plot, ordering, xi, min_samples, min_cluster_size):
    """Steep-area cluster extraction over the reachability plot.

    Returns [start, end] index pairs (inclusive, in ordering space), nested
    smaller clusters before the larger ones that contain them.
    """
    reachability_plot = np.hstack((reachability_plot, np.inf))
    xi_complement = 1 - xi
    sdas: list[dict] = []
    clusters: list[tuple[int, int]] = []
    index = 0
    mib = 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = reachability_plot[:-1] / reachability_plot[1:]
        steep_upward = ratio <= xi_complement
        steep_downward = ratio >= 1 / xi_complement
        downward = ratio > 1
        upward = ratio < 1

    for steep_index in np.flatnonzero(steep_upward | steep_downward):
        steep_index = int(steep_index)
        if steep_index < index:
            continue
        mib = max(mib, float(np.max(reachability_plot[index : steep_index + 1])))

        if steep_downward[steep_index]:
            sdas = _update_filter_sdas(sdas, mib, xi_complement, reachability_plot)
            d_start = steep_index
            d_end = _extend_region(steep_downward, upward, d_start, min_samples)
            sdas.append({"start": d_start, "end": d_end, "mib": 0.0})
            index = d_end + 1
            mib = float(reachability_plot[index])
        else:
            sdas = _update_filter_sdas(sdas, mib, xi_complement, reachability_plot)
            u_start = steep_index
            u_end = _extend_region(steep_upward, downward, u_start, min_samples)
            index = u_end + 1
            mib = float(reachability_plot[index])

            u_clusters: list[tuple[int, int]] = []
            for d_area in sdas:
                c_start = d_area["start"]
                c_end = u_end
                if reachability_plot[c_end + 1] * xi_complement < d_area["mib"]:
                    continue
                d_max = reachability_plot[d_area["start"]]
                if d_max * xi_complement >= reachability_plot[c_end + 1]:
                    while (
                        reachability_plot[c_start + 1] > reachability_plot[c_end + 1]
                        and c_start < d_area["end"]
                    ):
                        c_start += 1
                elif reachability_plot[c_end + 1] * xi_complement >= d_max:
                    while reachability_plot[c_end - 1] > d_max and c_end > u_start:
                        c_end -= 1
                c_start, c_end = _correct_predecessor(
                    reachability_plot, predecessor_plot, ordering, c_start, c_end
                )
                if c_start is None:
                    continue
                if c_end - c_start + 1 < min_cluster_size:
                    continue
                if c_start > d_area["end"]:
                    continue
                if c_end < u_start:
                    continue
                u_clusters.append((c_start, c_end))
            u_clusters.reverse()
            clusters.extend(u_clusters)
    return clusters


def _extract_xi_labels(ordering, clusters) -> np.ndarray:
    """Labels from nested cluster ranges; only ranges whose points are all
    still unlabeled get a label (smaller nested clusters first)."""
    labels = np.full(len(ordering), NOISE, dtype=np.int64)
    label = 0
    for start, end in clusters:
        if not (labels[start : end + 1] != NOISE).any():
            labels[start : end + 1] = label
            label += 1
    out = np.full(len(ordering), NOISE, dtype=np.int64)
    out[ordering] = labels
    return out


def noise_to_singletons(clustering: Clustering) -> Clustering:
    """Give every noise point its own fresh singleton cluster."""
    assignment = clustering.assignment.copy()
    next_id = clustering.n_clusters
    for i in np.flatnonzero(assignment == NOISE):
        assignment[i] = next_id
        next_id += 1
    return Clustering(assignment=assignment, n_clusters=next_id)
