"""Planted-cluster instances on grid graphs and recovery metrics."""
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import as_support, grid_graph
from .objectives import NodeData, normalize_features

__all__ = ["SynthSpec", "synth_instance", "plant_cluster", "metrics", "MODES"]

MODES = ("gaussian_mean", "binary_sensor")


@dataclass(frozen=True)
class SynthSpec:
    """A grid with one connected anomalous cluster.

    ``flip_rate`` is a percentage of nodes whose binary reading is flipped
    (binary mode only). ``signal_mu`` shifts the cluster mean (gaussian mode).
    """

    rows: int
    cols: int
    cluster_size: int
    signal_mu: float = 3.0
    flip_rate: float = 0.0
    seed: int = 0
    mode: str = "gaussian_mean"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValidationError("grid dimensions must be positive")
        if not 1 <= self.cluster_size <= self.rows * self.cols:
            raise ValidationError(
                f"cluster_size {self.cluster_size} does not fit a "
                f"{self.rows}x{self.cols} grid")
        if not 0.0 <= self.flip_rate <= 100.0:
            raise ValidationError("flip_rate is a percentage in [0, 100]")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")


def plant_cluster(graph, size, rng):
    """Connected node set grown breadth-first from a random node.

    Neighbours are visited in a seeded random order.
    """
    start = int(rng.integers(graph.n))
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue and len(order) < size:
        u = queue.popleft()
        nbrs = [int(w) for w in graph.neighbors(u)]
        rng.shuffle(nbrs)
        for w in nbrs:
            if w not in seen and len(order) < size:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return as_support(order)


def synth_instance(spec):
    """Build ``(graph, data, true_support)`` for ``spec``.

    Gaussian mode draws ``N(mu, 1)`` inside the cluster and ``N(0, 1)``
    elsewhere, then rescales onto ``[0, 0.999]``. Binary mode starts from
    the cluster indicator, flips ``round(flip_rate% * n)`` uniformly chosen
    nodes, and also exposes the readings as Poisson counts against a flat
    background rate.
    """
    rng = np.random.default_rng(spec.seed)
    graph = grid_graph(spec.rows, spec.cols)
    truth = plant_cluster(graph, spec.cluster_size, rng)
    n = graph.n
    inside = np.zeros(n)
    inside[list(truth)] = 1.0
    if spec.mode == "gaussian_mean":
        raw = rng.standard_normal(n) + spec.signal_mu * inside
        return graph, normalize_features(raw), truth
    flips = int(round(spec.flip_rate / 100.0 * n))
    reading = inside.copy()
    if flips:
        idx = rng.choice(n, size=flips, replace=False)
        reading[idx] = 1.0 - reading[idx]
    rate = max(reading.mean(), 0.5 / n)
    data = NodeData(feature=reading, observed=reading, expected=np.full(n, rate))
    return graph, data, truth


def metrics(found, truth):
    """``(precision, recall, f1)`` of ``found`` against ``truth``.

    An empty side scores 1 only when both sides are empty.
    """
    found, truth = set(found), set(truth)
    hit = len(found & truth)
    precision = hit / len(found) if found else float(not truth)
    recall = hit / len(truth) if truth else float(not found)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1
