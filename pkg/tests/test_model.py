import numpy as np
import pytest

from labelprism import (
    EdgeLabel,
    EdgeRecord,
    GraphInputError,
    LabeledGraph,
    NodeLabel,
    expand_graph,
    generate_synthetic,
    graph_from_document,
    seed_label_positions,
)


def node(nid, w=1.0, h=1.0):
    return NodeLabel(id=nid, text=nid.upper(), half_width=w, half_height=h)


def triangle_graph():
    return LabeledGraph(
        nodes=[node("a"), node("b"), node("c")],
        edges=[EdgeRecord("a", "b"), EdgeRecord("b", "c"), EdgeRecord("c", "a")],
    )


class TestValidation:
    def test_duplicate_node_id_rejected(self):
        with pytest.raises(GraphInputError, match="duplicate"):
            LabeledGraph(nodes=[node("a"), node("a")], edges=[])

    def test_unknown_endpoint_rejected(self):
        with pytest.raises(GraphInputError, match="unknown node"):
            LabeledGraph(nodes=[node("a")], edges=[EdgeRecord("a", "b")])

    def test_self_loop_rejected(self):
        with pytest.raises(GraphInputError, match="self-loop"):
            LabeledGraph(nodes=[node("a"), node("b")], edges=[EdgeRecord("a", "a")])

    def test_empty_graph_rejected(self):
        with pytest.raises(GraphInputError, match="at least one node"):
            LabeledGraph(nodes=[], edges=[])

    def test_nonpositive_extent_rejected(self):
        with pytest.raises(GraphInputError, match="positive"):
            NodeLabel(id="a", text="A", half_width=0.0, half_height=1.0)
        with pytest.raises(GraphInputError, match="positive"):
            EdgeLabel(text="L", half_width=1.0, half_height=-2.0)


class TestExpandGraph:
    def test_no_labels_is_isomorphic(self):
        g = triangle_graph()
        ga = expand_graph(g)
        assert [n.id for n in ga.all_nodes] == ["a", "b", "c"]
        assert ga.edges == [(0, 1), (1, 2), (2, 0)]
        assert ga.label_origin == {}
        assert ga.n_original == 3
        assert not any(ga.is_label_node(i) for i in range(3))

    def test_single_labeled_edge(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[EdgeRecord("a", "b", label=EdgeLabel("L", 0.5, 0.25))],
        )
        ga = expand_graph(g)
        assert ga.n_nodes == 3
        assert ga.edges == [(0, 2), (2, 1)]
        assert ga.label_origin == {2: (0, 1)}
        assert ga.all_nodes[2].text == "L"
        assert ga.all_nodes[2].id == "__elabel_a_b_0"
        assert ga.is_label_node(2) and not ga.is_label_node(0)

    def test_parallel_labeled_edges(self):
        # Enumerated by hand: 2 original nodes + 2 label nodes, 4 edges,
        # both label nodes mapping to the same parent pair.
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[
                EdgeRecord("a", "b", label=EdgeLabel("L1", 0.5, 0.25)),
                EdgeRecord("a", "b", label=EdgeLabel("L2", 0.5, 0.25)),
            ],
        )
        ga = expand_graph(g)
        assert ga.n_nodes == 4
        assert len(ga.edges) == 4
        assert ga.label_origin == {2: (0, 1), 3: (0, 1)}
        assert ga.all_nodes[2].id != ga.all_nodes[3].id

    def test_counts_match_label_count(self):
        doc = generate_synthetic("random_gnm", {"n": 15, "m": 25, "labeled_fraction": 0.6}, seed=3)
        g, _ = graph_from_document(doc)
        n_labeled = sum(1 for e in g.edges if e.label is not None)
        ga = expand_graph(g)
        assert ga.n_nodes == g.n_nodes + n_labeled
        assert len(ga.edges) == len(g.edges) + n_labeled

    def test_label_node_degree_exactly_two(self):
        doc = generate_synthetic("relay_chain", {"countries": 12, "chains": 3, "chain_length": 6}, seed=5)
        g, _ = graph_from_document(doc)
        ga = expand_graph(g)
        degree = {}
        for u, v in ga.edges:
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
        for k in ga.label_node_indices:
            assert degree[k] == 2

    def test_synthetic_id_collision_resolved(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b"), node("__elabel_a_b_0")],
            edges=[EdgeRecord("a", "b", label=EdgeLabel("L", 0.5, 0.25))],
        )
        ga = expand_graph(g)
        ids = [n.id for n in ga.all_nodes]
        assert len(set(ids)) == len(ids)

    def test_color_tags_carried_to_both_halves(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[EdgeRecord("a", "b", label=EdgeLabel("L", 0.5, 0.25), color_tag="summer")],
        )
        ga = expand_graph(g)
        assert ga.edge_color_tags == ["summer", "summer"]


class TestSeedLabelPositions:
    def test_midpoint_simple(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[EdgeRecord("a", "b", label=EdgeLabel("L", 0.5, 0.25))],
        )
        ga = expand_graph(g)
        x = seed_label_positions(ga, np.array([[0.0, 0.0], [2.0, 0.0]]))
        assert np.allclose(x[2], [1.0, 0.0])

        x = seed_label_positions(ga, np.array([[1.0, 1.0], [3.0, 5.0]]))
        assert np.allclose(x[2], [2.0, 3.0])

    def test_parallel_edges_jittered_apart(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[
                EdgeRecord("a", "b", label=EdgeLabel("L1", 0.5, 0.25)),
                EdgeRecord("a", "b", label=EdgeLabel("L2", 0.5, 0.25)),
            ],
        )
        ga = expand_graph(g)
        x = seed_label_positions(ga, np.array([[0.0, 0.0], [2.0, 0.0]]))
        # Documented rule: midpoint +/- 1e-3 * edge length, perpendicular.
        assert np.allclose(sorted(x[2:, 1]), [-0.002, 0.002])
        assert np.allclose(x[2:, 0], [1.0, 1.0])
        assert not np.array_equal(x[2], x[3])

    def test_three_parallel_labels_all_distinct(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[
                EdgeRecord("a", "b", label=EdgeLabel(f"L{i}", 0.5, 0.25))
                for i in range(3)
            ],
        )
        ga = expand_graph(g)
        x = seed_label_positions(ga, np.array([[0.0, 0.0], [0.0, 4.0]]))
        rows = {tuple(r) for r in x}
        assert len(rows) == ga.n_nodes

    def test_coincident_parents_fall_back(self):
        g = LabeledGraph(
            nodes=[node("a"), node("b")],
            edges=[
                EdgeRecord("a", "b", label=EdgeLabel("L1", 0.5, 0.25)),
                EdgeRecord("a", "b", label=EdgeLabel("L2", 0.5, 0.25)),
            ],
        )
        ga = expand_graph(g)
        x = seed_label_positions(ga, np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert not np.array_equal(x[2], x[3])

    def test_unlabeled_graph_passthrough(self):
        g = triangle_graph()
        ga = expand_graph(g)
        base = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        x = seed_label_positions(ga, base)
        assert np.array_equal(x, base)
