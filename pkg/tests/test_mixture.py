import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ambnet.generators import FAMILIES, gen_er
from ambnet.graph import Graph, load_bundled
from ambnet.mixture import (MixtureDescription, Partition, classify_subnetwork,
                            describe, detect_communities, induced_subgraph,
                            mixture_weights, modularity)


def two_cliques(size=5, bridge=True):
    edges = [(i, j) for i in range(size) for j in range(i + 1, size)]
    edges += [(size + i, size + j) for i in range(size) for j in range(i + 1, size)]
    if bridge:
        edges.append((0, size))
    return Graph.from_edges(2 * size, edges)


def test_partition_validation():
    Partition(n=3, communities=((0, 1), (2,)))
    with pytest.raises(ValueError):
        Partition(n=3, communities=((0, 1),))
    with pytest.raises(ValueError):
        Partition(n=3, communities=((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        Partition(n=3, communities=((0, 1), (2,), ()))


def test_modularity_hand_value():
    # two triangles joined by one edge; split into the triangles:
    # Q = sum(in_c/m - (deg_c/2m)^2) = 6/7 - 2*(7/14)^2
    g = two_cliques(size=3)
    q = modularity(g, [(0, 1, 2), (3, 4, 5)])
    assert q == pytest.approx(6 / 7 - 2 * (7 / 14) ** 2)


def test_modularity_whole_network_is_degree_penalty_only():
    g = two_cliques(size=4)
    assert modularity(g, [tuple(range(8))]) == pytest.approx(1 - 1, abs=1e-12)


def test_modularity_matches_reference_implementation():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(0)
    for seed in range(5):
        g = gen_er(12, 20, seed=seed)
        nxg = nx.Graph(); nxg.add_nodes_from(range(12)); nxg.add_edges_from(g.edges())
        verts = rng.permutation(12)
        cut = 1 + int(rng.integers(10))
        part = [tuple(sorted(verts[:cut])), tuple(sorted(verts[cut:]))]
        expected = nx.algorithms.community.modularity(nxg, [set(c) for c in part])
        assert modularity(g, part) == pytest.approx(expected)


def test_modularity_rejects_edgeless():
    with pytest.raises(ValueError):
        modularity(Graph.empty(4), [(0, 1, 2, 3)])


def test_detect_communities_finds_planted_cliques():
    g = two_cliques(size=5)
    part = detect_communities(g)
    assert part.communities == ((0, 1, 2, 3, 4), (5, 6, 7, 8, 9))
    assert modularity(g, part.communities) > 0.3


def test_detect_communities_is_deterministic():
    g = gen_er(30, 60, seed=4)
    assert detect_communities(g) == detect_communities(g)


def test_detect_communities_edgeless_stays_singletons():
    part = detect_communities(Graph.empty(4))
    assert part.communities == ((0,), (1,), (2,), (3,))


def test_detect_communities_complete_graph_is_one_community():
    for n in (4, 5, 6):
        g = Graph(~np.eye(n, dtype=bool))
        assert detect_communities(g).communities == (tuple(range(n)),)


def test_merging_same_label_communities_keeps_weights():
    merged = mixture_weights("ER", ["WS", "NCN"], [6, 4])
    split = mixture_weights("ER", ["WS", "WS", "NCN"], [2, 4, 4])
    for label in FAMILIES:
        assert merged[label] == pytest.approx(split[label], abs=1e-12)


def test_detect_communities_social_network_quality():
    g = load_bundled("zachary")
    part = detect_communities(g)
    assert 2 <= len(part.communities) <= 6
    assert modularity(g, part.communities) > 0.35
    assert sorted(v for c in part.communities for v in c) == list(range(34))


def test_induced_subgraph():
    g = two_cliques(size=3)
    sub = induced_subgraph(g, (3, 4, 5))
    assert sub.n == 3
    assert sub.edge_count == 3


def test_mixture_weights_even_split():
    # whole label A, two equal communities labelled A and B
    w = mixture_weights("ER", ["ER", "NCN"], [10, 10])
    assert w["ER"] == pytest.approx(0.75)
    assert w["NCN"] == pytest.approx(0.25)
    assert w["WS"] == 0.0 and w["BA"] == 0.0


@given(st.lists(st.sampled_from(FAMILIES), min_size=1, max_size=8), st.data())
def test_mixture_weights_always_sum_to_one(labels, data):
    sizes = [data.draw(st.integers(1, 50)) for _ in labels]
    whole = data.draw(st.sampled_from(FAMILIES))
    w = mixture_weights(whole, labels, sizes)
    assert sum(w.values()) == pytest.approx(1.0, abs=1e-12)
    assert w[whole] >= 0.5


def test_mixture_weights_validation():
    with pytest.raises(ValueError):
        mixture_weights("ER", [], [])
    with pytest.raises(ValueError):
        mixture_weights("ER", ["NCN"], [0])
    with pytest.raises(ValueError):
        mixture_weights("XX", ["NCN"], [3])
    with pytest.raises(ValueError):
        mixture_weights("ER", ["NCN", "WS"], [3])


def test_description_format_ordering_and_zero_omission():
    desc = MixtureDescription(
        weights={"ER": 0.0, "NCN": 0.07, "WS": 0.43, "BA": 0.50},
        whole_label="BA", community_labels=("WS", "NCN"), community_sizes=(30, 5))
    assert desc.format() == "0.50 BA + 0.43 WS + 0.07 NCN"
    assert desc.to_json()["text"] == "0.50 BA + 0.43 WS + 0.07 NCN"


def test_description_format_tie_breaks_by_family_order():
    desc = MixtureDescription(
        weights={"ER": 0.5, "NCN": 0.0, "WS": 0.5, "BA": 0.0},
        whole_label="ER", community_labels=("WS",), community_sizes=(4,))
    assert desc.format() == "0.50 ER + 0.50 WS"


class StubClassifier:
    """Labels a network by white-pixel count parity; deterministic."""

    input_side = 40

    def predict(self, X):
        return np.array([FAMILIES[int(x.sum()) % 4] for x in X])


def test_classify_subnetwork_size_guard():
    with pytest.raises(ValueError):
        classify_subnetwork(StubClassifier(), Graph.empty(41))


def test_describe_blends_whole_and_parts():
    g = two_cliques(size=5)
    desc = describe(StubClassifier(), g, seed=0)
    assert sum(desc.weights.values()) == pytest.approx(1.0, abs=1e-12)
    assert desc.community_sizes == (5, 5)
    assert desc.weights[desc.whole_label] >= 0.5
    again = describe(StubClassifier(), g, seed=0)
    assert again == desc
