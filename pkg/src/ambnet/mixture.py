"""Whole-plus-parts mixture description of a network.

A network rarely matches a single generator family. The description here
classifies the whole network once, splits it into communities by greedy
modularity maximization, classifies each community's induced subnetwork,
and blends the results: half the weight goes to the whole-network label and
half is shared among community labels in proportion to community size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generators import FAMILIES
from .graph import Graph
from .image import pad_center, render
from .vra import vra_apply


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of vertices 0..n-1 by non-empty communities."""

    n: int
    communities: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        communities = tuple(tuple(int(v) for v in c) for c in self.communities)
        object.__setattr__(self, "communities", communities)
        seen = [v for c in communities for v in c]
        if not communities or any(not c for c in communities):
            raise ValueError("communities must be non-empty")
        if sorted(seen) != list(range(self.n)):
            raise ValueError(f"communities must partition 0..{self.n - 1}")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.communities)


def modularity(g: Graph, communities) -> float:
    """Fraction of edges inside communities minus the degree-based expectation."""
    m = g.edge_count
    if m == 0:
        raise ValueError("modularity is undefined for an edgeless network")
    deg = g.adj.sum(axis=1)
    q = 0.0
    for c in communities:
        idx = np.fromiter(c, dtype=np.int64)
        internal = g.adj[np.ix_(idx, idx)].sum() / 2
        q += internal / m - (deg[idx].sum() / (2 * m)) ** 2
    return float(q)


def detect_communities(g: Graph, seed: int = 0) -> Partition:
    """Agglomerative modularity maximization with deterministic tie-breaks.

    Starts from singletons and repeatedly merges the community pair with the
    largest modularity gain, preferring the lexicographically smallest pair
    on ties, until no merge improves modularity. Edgeless networks stay as
    singletons. The procedure has no random choices; ``seed`` is accepted for
    interface symmetry with the other pipeline stages and ignored.
    """
    n = g.n
    m = g.edge_count
    groups: list[list[int]] = [[v] for v in range(n)]
    if m == 0:
        return Partition(n=n, communities=tuple((v,) for v in range(n)))
    deg = g.adj.sum(axis=1).astype(np.float64)
    # links[a][b]: edge count between current groups a and b; degsum[a]: total degree.
    links = g.adj.astype(np.float64).copy()
    degsum = deg.copy()
    alive = np.ones(n, dtype=bool)
    while alive.sum() > 1:
        live = np.nonzero(alive)[0]
        gain = (links[np.ix_(live, live)] / m
                - np.outer(degsum[live], degsum[live]) / (2 * m) ** 2)
        np.fill_diagonal(gain, -np.inf)
        flat = np.argmax(gain)
        best = gain.flat[flat]
        if best <= 1e-12:
            break
        a, b = sorted((int(live[flat // len(live)]), int(live[flat % len(live)])))
        groups[a].extend(groups[b])
        groups[b] = []
        links[a, :] += links[b, :]
        links[:, a] += links[:, b]
        links[a, a] = 0.0
        degsum[a] += degsum[b]
        alive[b] = False
    communities = sorted(tuple(sorted(grp)) for grp in groups if grp)
    return Partition(n=n, communities=tuple(communities))


def induced_subgraph(g: Graph, vertices) -> Graph:
    """Subnetwork on the given vertices, reindexed to 0..len-1 in sorted order."""
    idx = np.array(sorted(int(v) for v in vertices), dtype=np.int64)
    return Graph(adj=g.adj[np.ix_(idx, idx)])


def classify_subnetwork(clf, g: Graph, seed: int = 0) -> str:
    """Canonicalize, render, pad to the model's input side, and predict."""
    if g.n > clf.input_side:
        raise ValueError(f"network has {g.n} vertices but the model accepts "
                         f"at most {clf.input_side}")
    image = pad_center(render(vra_apply(g, seed=seed)), clf.input_side)
    return str(clf.predict(image.pixels[None, :, :].astype(np.float64))[0])


def mixture_weights(whole_label: str, community_labels, community_sizes) -> dict[str, float]:
    """Blend: 0.5 on the whole-network label, 0.5 split by community size."""
    labels = list(community_labels)
    sizes = [int(s) for s in community_sizes]
    if len(labels) != len(sizes) or not labels:
        raise ValueError("need one size per community label")
    if min(sizes) <= 0:
        raise ValueError("community sizes must be positive")
    known = set(FAMILIES)
    if whole_label not in known or any(lab not in known for lab in labels):
        raise ValueError(f"labels must come from {FAMILIES}")
    n = sum(sizes)
    weights = {label: 0.0 for label in FAMILIES}
    weights[whole_label] += 0.5
    for label, size in zip(labels, sizes):
        weights[label] += 0.5 * size / n
    return weights


@dataclass(frozen=True)
class MixtureDescription:
    weights: dict[str, float]
    whole_label: str
    community_labels: tuple[str, ...]
    community_sizes: tuple[int, ...]

    def format(self) -> str:
        """Two-decimal terms, descending weight, zero-weight families omitted."""
        ordered = sorted(((label, w) for label, w in self.weights.items() if w > 0),
                         key=lambda kv: (-kv[1], FAMILIES.index(kv[0])))
        return " + ".join(f"{w:.2f} {label}" for label, w in ordered)

    def to_json(self) -> dict:
        return {
            "weights": {k: float(v) for k, v in self.weights.items()},
            "whole_label": self.whole_label,
            "community_labels": list(self.community_labels),
            "community_sizes": list(self.community_sizes),
            "text": self.format(),
        }


def describe(clf, g: Graph, seed: int = 0) -> MixtureDescription:
    """Full mixture description; deterministic given (model, network, seed)."""
    partition = detect_communities(g)
    substream = np.random.SeedSequence(seed).generate_state(
        1 + partition.n, np.uint64)
    whole_label = classify_subnetwork(clf, g, seed=int(substream[0]))
    community_labels = tuple(
        classify_subnetwork(clf, induced_subgraph(g, community),
                            seed=int(substream[1 + i]))
        for i, community in enumerate(partition.communities))
    weights = mixture_weights(whole_label, community_labels, partition.sizes)
    return MixtureDescription(weights=weights, whole_label=whole_label,
                              community_labels=community_labels,
                              community_sizes=partition.sizes)
