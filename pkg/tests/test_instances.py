import logging

import numpy as np
import pytest

from algcon.graph import GraphError, build_graph, is_connected
from algcon.instances import (ParseError, generate_augmentation_instance, generate_instance,
                              load_instance, load_problem, parse_edgelist, parse_posegraph,
                              save_instance, write_edgelist)
from algcon.problem import Variant


class TestGenerate:
    def test_edge_count_from_density(self):
        # round(0.4 * 190) = 76
        g = generate_instance(20, 0.4, 0)
        assert g.m == 76 and is_connected(g)

    @pytest.mark.parametrize("n", [2, 5, 9])
    def test_complete(self, n):
        g = generate_instance(n, 1.0, 3)
        assert g.m == n * (n - 1) // 2
        assert np.all((g.weights > 0) & (g.weights <= 1))

    def test_deterministic(self):
        assert generate_instance(12, 0.6, 7).edges == generate_instance(12, 0.6, 7).edges
        assert generate_instance(12, 0.6, 7).edges != generate_instance(12, 0.6, 8).edges

    def test_low_density_falls_back_to_tree(self):
        with pytest.warns(UserWarning, match="too low"):
            g = generate_instance(10, 0.05, 0)
        assert g.m == 9 and is_connected(g)

    @pytest.mark.parametrize("n, d", [(1, 1.0), (5, 0.0), (5, 1.5)])
    def test_rejects(self, n, d):
        with pytest.raises(ValueError):
            generate_instance(n, d)

    def test_augmentation_instance(self):
        base, cand = generate_augmentation_instance(50, 25, 1)
        assert base.pairs() == [(i, i + 1) for i in range(49)]
        assert cand.m == 25
        assert all(j - i >= 2 for i, j in cand.pairs())

    def test_augmentation_too_many(self):
        with pytest.raises(ValueError, match="at most 3"):
            generate_augmentation_instance(4, 4)


class TestEdgeList:
    def test_round_trip(self, tmp_path):
        g = generate_instance(7, 0.7, 2)
        p = tmp_path / "g.csv"
        write_edgelist(g, p)
        assert parse_edgelist(p).edges == g.edges

    def test_isolated_vertex_kept_by_header(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("# n=5\ni,j,w\n0,1,1.0\n")
        assert parse_edgelist(p).n == 5

    def test_n_inferred(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,1,2\n1,3,0.5\n")
        assert parse_edgelist(p).n == 4

    @pytest.mark.parametrize("body, line, msg", [
        ("0,1,1\n1,1,2\n", 2, "self-loop"),
        ("0,1,1\n1,0,2\n", 2, "duplicate pair"),
        ("0,1,0\n", 1, "non-positive"),
        ("0,1\n", 1, "expected"),
        ("0,x,1\n", 1, "malformed"),
        ("# n=3\n0,5,1\n", 2, "out of range"),
    ])
    def test_errors_carry_line(self, tmp_path, body, line, msg):
        p = tmp_path / "g.csv"
        p.write_text(body)
        with pytest.raises(ParseError, match=msg) as info:
            parse_edgelist(p)
        assert info.value.line == line


class TestInstanceJson:
    def test_round_trip_with_base(self, tmp_path):
        base, cand = generate_augmentation_instance(10, 6, 0)
        p = tmp_path / "i.json"
        save_instance(p, cand, base, {"seed": 0})
        g, b, meta = load_instance(p)
        assert g.edges == cand.edges and b.edges == base.edges and meta == {"seed": 0}
        spec = load_problem(p, "augment", 2)
        assert spec.variant is Variant.AUGMENTATION and spec.budget == 2

    def test_tree_rejects_base(self, tmp_path):
        base, cand = generate_augmentation_instance(6, 3, 0)
        p = tmp_path / "i.json"
        save_instance(p, cand, base)
        with pytest.raises(GraphError, match="base"):
            load_problem(p, "tree")

    def test_augment_needs_base(self, tmp_path):
        p = tmp_path / "i.json"
        save_instance(p, generate_instance(5, 1.0, 0))
        with pytest.raises(GraphError, match="base_edges"):
            load_problem(p, "augment", 1)
        assert load_problem(p, "tree").variant is Variant.SPANNING_TREE

    def test_missing_field(self, tmp_path):
        p = tmp_path / "i.json"
        p.write_text('{"format": "algcon-instance"}')
        with pytest.raises(ParseError, match="missing field"):
            load_instance(p)

    def test_overlap(self, tmp_path):
        p = tmp_path / "i.json"
        p.write_text('{"n": 3, "edges": [[0, 1, 1.0]], "base_edges": [[0, 1, 1.0], [1, 2, 1.0]]}')
        with pytest.raises(ParseError, match="overlap"):
            load_instance(p)

    def test_unknown_variant(self, tmp_path):
        p = tmp_path / "i.json"
        save_instance(p, generate_instance(4, 1.0, 0))
        with pytest.raises(ValueError, match="variant"):
            load_problem(p, "forest")


SE2_INFO = "1 0 0 1 0 {w}"


def se2_file(tmp_path, lines):
    p = tmp_path / "pg.g2o"
    p.write_text("\n".join(lines) + "\n")
    return p


class TestPoseGraph:
    def test_basic(self, tmp_path):
        lines = [f"VERTEX_SE2 {10 * k} 0 0 0" for k in range(4)]
        lines += [f"EDGE_SE2 {10 * k} {10 * k + 10} 1 0 0 " + SE2_INFO.format(w=2.0) for k in range(3)]
        lines += ["EDGE_SE2 0 30 0 0 0 " + SE2_INFO.format(w=5.0)]
        spec = parse_posegraph(se2_file(tmp_path, lines))
        assert spec.n == 4
        assert spec.base.pairs() == [(0, 1), (1, 2), (2, 3)]
        assert list(spec.base.weights) == [2.0, 2.0, 2.0]
        assert spec.candidates.edges == ((0, 3, 5.0),)
        assert spec.budget == 1

    def test_zero_information_defaults_to_one(self, tmp_path, caplog):
        lines = ["EDGE_SE2 0 1 0 0 0 " + SE2_INFO.format(w=0), "EDGE_SE2 1 2 0 0 0 1 0 0"]
        with caplog.at_level(logging.WARNING):
            spec = parse_posegraph(se2_file(tmp_path, lines))
        assert list(spec.base.weights) == [1.0, 1.0]
        assert "weight 1" in caplog.text

    def test_repeated_measurements_sum(self, tmp_path):
        lines = ["EDGE_SE2 0 1 0 0 0 " + SE2_INFO.format(w=1.0),
                 "EDGE_SE2 1 2 0 0 0 " + SE2_INFO.format(w=1.0),
                 "EDGE_SE2 2 0 0 0 0 " + SE2_INFO.format(w=1.5),
                 "EDGE_SE2 0 2 0 0 0 " + SE2_INFO.format(w=2.0)]
        spec = parse_posegraph(se2_file(tmp_path, lines), budget=5)
        assert spec.candidates.edges == ((0, 2, 3.5),)
        assert spec.budget == 1

    def test_se3_and_unknown_records(self, tmp_path, caplog):
        info = " ".join(["1"] * 20 + ["4"])
        lines = ["FIX 0", "EDGE_SE3:QUAT 0 1 0 0 0 0 0 0 1 " + info,
                 "EDGE_SE3:QUAT 1 2 0 0 0 0 0 0 1 " + info]
        with caplog.at_level(logging.WARNING):
            spec = parse_posegraph(se2_file(tmp_path, lines))
        assert list(spec.base.weights) == [4.0, 4.0]
        assert "skipped 1" in caplog.text

    def test_broken_chain(self, tmp_path):
        lines = ["EDGE_SE2 0 1 0 0 0 " + SE2_INFO.format(w=1.0),
                 "EDGE_SE2 2 3 0 0 0 " + SE2_INFO.format(w=1.0)]
        with pytest.raises(ParseError, match="broken between poses 1 and 2"):
            parse_posegraph(se2_file(tmp_path, lines))

    def test_malformed_record(self, tmp_path):
        with pytest.raises(ParseError, match="line 1"):
            parse_posegraph(se2_file(tmp_path, ["EDGE_SE2 0 x"]))

    def test_load_problem_dispatch(self, tmp_path):
        lines = [f"EDGE_SE2 {k} {k + 1} 0 0 0 " + SE2_INFO.format(w=1.0) for k in range(4)]
        lines += ["EDGE_SE2 0 4 0 0 0 " + SE2_INFO.format(w=1.0),
                  "EDGE_SE2 1 3 0 0 0 " + SE2_INFO.format(w=1.0)]
        spec = load_problem(se2_file(tmp_path, lines), budget=1)
        assert spec.candidates.m == 2 and spec.budget == 1
