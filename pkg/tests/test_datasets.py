import gzip
from pathlib import Path

import numpy as np
import pytest

from signet.datasets import (
    DataError,
    DatasetFormat,
    DatasetSpec,
    bootstrap_connected_subgraph,
    graph_stats,
    parse_edge_list,
    write_generic_csv,
)
from signet.graph import SignedGraph, triad_count_upper_bound

DATA = Path(__file__).parent / "data"


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestParsers:
    def test_minimal_snap_file(self, tmp_path):
        p = _write(tmp_path, "g.txt", "# comment\n1\t2\t-1\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.SNAP_TAB_SIGNED))
        assert rep.graph.n == 2
        assert rep.graph.m == 1
        assert rep.graph.get_sign(0, 1) == -1

    def test_bitcoin_rating_sign(self, tmp_path):
        p = _write(tmp_path, "g.csv", "6,2,4,1289241911\n2,5,-10,1289241912\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.BITCOIN_CSV))
        a, b = rep.label_to_node["6"], rep.label_to_node["2"]
        assert rep.graph.get_sign(a, b) == 1
        c = rep.label_to_node["5"]
        assert rep.graph.get_sign(b, c) == -1

    def test_zero_rating_rejected_and_counted(self, tmp_path):
        p = _write(tmp_path, "g.csv", "1,2,0,5\n1,3,2,6\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.BITCOIN_CSV))
        assert rep.n_zero_weight == 1
        assert rep.graph.m == 1

    def test_generic_csv(self, tmp_path):
        p = _write(tmp_path, "g.csv", "a,b,1\nb,c,-1\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.GENERIC_CSV))
        assert rep.graph.n == 3 and rep.graph.m == 2

    def test_gzip_by_extension(self, tmp_path):
        p = tmp_path / "g.txt.gz"
        with gzip.open(p, "wt") as fh:
            fh.write("0\t1\t1\n1\t2\t-1\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.SNAP_TAB_SIGNED))
        assert rep.graph.m == 2

    def test_duplicates_last_writer_wins(self, tmp_path):
        p = _write(tmp_path, "g.csv", "1,2,1\n2,1,-1\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.GENERIC_CSV))
        assert rep.n_duplicates == 1
        assert rep.graph.get_sign(0, 1) == -1

    def test_self_loops_dropped(self, tmp_path):
        p = _write(tmp_path, "g.csv", "1,1,1\n1,2,1\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.GENERIC_CSV))
        assert rep.n_self_loops == 1
        assert rep.graph.m == 1

    def test_malformed_line_reports_number(self, tmp_path):
        p = _write(tmp_path, "g.txt", "0\t1\t1\n0 2\n")
        with pytest.raises(DataError, match=":2:"):
            parse_edge_list(DatasetSpec(p, DatasetFormat.SNAP_TAB_SIGNED))

    def test_non_numeric_weight(self, tmp_path):
        p = _write(tmp_path, "g.csv", "1,2,x\n")
        with pytest.raises(DataError, match=":1:"):
            parse_edge_list(DatasetSpec(p, DatasetFormat.GENERIC_CSV))

    def test_empty_file_rejected(self, tmp_path):
        p = _write(tmp_path, "g.csv", "# only a comment\n")
        with pytest.raises(DataError, match="no edge records"):
            parse_edge_list(DatasetSpec(p, DatasetFormat.GENERIC_CSV))

    def test_missing_file(self):
        with pytest.raises(DataError, match="not found"):
            parse_edge_list(DatasetSpec("/nonexistent/file.csv"))

    def test_relabeling_round_trips(self, tmp_path):
        p = _write(tmp_path, "g.csv", "x,y,1\ny,z,-1\nx,z,1\n")
        rep = parse_edge_list(DatasetSpec(p, DatasetFormat.GENERIC_CSV))
        assert sorted(rep.label_to_node.values()) == list(range(rep.graph.n))
        for label, node in rep.label_to_node.items():
            assert rep.labels[node] == label


class TestBootstrap:
    def _ring_with_core(self):
        g = SignedGraph(30)
        for i in range(10):
            for j in range(i + 1, 10):
                g.set_sign(i, j, 1)
        for i in range(10, 29):
            g.set_sign(i, i + 1, -1)
        g.set_sign(0, 10, 1)
        return g

    def test_full_size_returns_whole_graph(self):
        g = self._ring_with_core()
        bs = bootstrap_connected_subgraph(g, 30, 1)
        assert bs.graph.n == 30 and bs.graph.m == g.m

    def test_single_node(self):
        g = self._ring_with_core()
        bs = bootstrap_connected_subgraph(g, 1, 2)
        assert bs.graph.n == 1 and bs.graph.m == 0

    def test_exact_size_and_connected(self):
        g = self._ring_with_core()
        for seed in range(10):
            bs = bootstrap_connected_subgraph(g, 12, seed)
            assert bs.graph.n == 12
            seen = {0}
            stack = [0]
            while stack:
                v = stack.pop()
                for w in bs.graph.neighbors(v):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            assert len(seen) == 12

    def test_native_signs_preserved(self):
        g = self._ring_with_core()
        bs = bootstrap_connected_subgraph(g, 30, 3)
        index = {orig: new for new, orig in enumerate(bs.nodes)}
        for i, j, s in g.edges():
            assert bs.graph.get_sign(index[i], index[j]) == s

    def test_component_size_check(self):
        g = SignedGraph(6)
        g.set_sign(0, 1, 1)
        g.set_sign(2, 3, 1)
        with pytest.raises(DataError, match="component"):
            bootstrap_connected_subgraph(g, 3, 1)

    def test_seeds_give_distinct_samples(self):
        g = self._ring_with_core()
        a = bootstrap_connected_subgraph(g, 12, 100)
        b = bootstrap_connected_subgraph(g, 12, 101)
        assert a.nodes != b.nodes

    def test_deterministic_per_seed(self):
        g = self._ring_with_core()
        assert (bootstrap_connected_subgraph(g, 12, 5).nodes
                == bootstrap_connected_subgraph(g, 12, 5).nodes)


class TestGraphStats:
    def test_complete_graph(self):
        st = graph_stats(SignedGraph.complete(100, 1))
        assert st.density == 1.0
        assert st.positive_fraction == 1.0

    def test_empty_graph(self):
        st = graph_stats(SignedGraph(5))
        assert st.density == 0.0 and st.triads == 0

    def test_write_round_trip(self, tmp_path):
        g = SignedGraph(4)
        g.set_sign(0, 1, 1)
        g.set_sign(1, 2, -1)
        write_generic_csv(g, tmp_path / "g.csv")
        rep = parse_edge_list(DatasetSpec(tmp_path / "g.csv", DatasetFormat.GENERIC_CSV))
        assert sorted(rep.graph.edges()) == [(0, 1, 1), (1, 2, -1)]


class TestShippedFixtures:
    """The synthetic stand-ins reproduce the published summary statistics."""

    def test_congress(self):
        rep = parse_edge_list(DatasetSpec(DATA / "cs_cosponsor.csv", DatasetFormat.GENERIC_CSV))
        st = graph_stats(rep.graph)
        assert (st.n, st.m, st.triads) == (100, 3696, 74140)
        assert st.density == pytest.approx(0.7467, abs=1e-4)

    def test_slashdot(self):
        rep = parse_edge_list(DatasetSpec(DATA / "sl_sample.txt", DatasetFormat.SNAP_TAB_SIGNED))
        st = graph_stats(rep.graph)
        assert (st.n, st.m, st.triads) == (747, 3065, 4268)
        assert st.density == pytest.approx(0.0110, abs=2e-4)

    def test_bitcoin(self):
        rep = parse_edge_list(DatasetSpec(DATA / "bc_sample.csv", DatasetFormat.BITCOIN_CSV))
        st = graph_stats(rep.graph)
        assert (st.n, st.m, st.triads) == (709, 2334, 1588)
        assert st.density == pytest.approx(0.0093, abs=2e-4)

    def test_triad_bounds_hold(self):
        for name, fmt in (
            ("cs_cosponsor.csv", DatasetFormat.GENERIC_CSV),
            ("sl_sample.txt", DatasetFormat.SNAP_TAB_SIGNED),
            ("bc_sample.csv", DatasetFormat.BITCOIN_CSV),
        ):
            st = graph_stats(parse_edge_list(DatasetSpec(DATA / name, fmt)).graph)
            assert st.triads <= triad_count_upper_bound(st.n, st.m)
