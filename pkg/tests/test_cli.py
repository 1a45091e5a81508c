import json

import pytest
from hypothesis import given, settings, strategies as st

from matchtopo.cli import main, render
from matchtopo.errors import ParseError
from matchtopo.graphio import format_bipartite, format_graph, parse_bipartite, parse_graph
from matchtopo.graphs import BipartiteGraph, Graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_parse_path():
    g = parse_graph("3\n1 2\n2 3\n")
    assert g.n == 3 and sorted(g.edge_list()) == [(1, 2), (2, 3)]


def test_parse_bipartite_example():
    b = parse_bipartite("2 2\n1 1\n1 2\n")
    assert (b.r, b.s) == (2, 2) and sorted(b.edge_list()) == [(1, 1), (1, 2)]


def test_comments_and_blank_lines():
    g = parse_graph("# header\n4\n\n1 4  # an edge\n")
    assert g.edge_list() == [(1, 4)]


@pytest.mark.parametrize("text,line", [
    ("3\n1 1\n", 2), ("3\n1 2\n2 1\n", 3), ("3\n1 4\n", 2), ("3\n1 2 3\n", 2), ("", 1), ("x\n", 1),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_graph(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize("text,line", [("2 2\n1 3\n", 2), ("2 2\n1 1\n1 1\n", 3), ("2\n", 1)])
def test_parse_bipartite_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_bipartite(text)
    assert info.value.line == line


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << (n * (n - 1) // 2)) - 1))))
def test_graph_roundtrip(nm):
    n, mask = nm
    g = Graph(n, mask)
    assert parse_graph(format_graph(g)) == g


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.integers(0, 4), st.integers(0, 4)).flatmap(
    lambda rs: st.tuples(st.just(rs), st.integers(0, (1 << (rs[0] * rs[1])) - 1))))
def test_bipartite_roundtrip(arg):
    (r, s), mask = arg
    b = BipartiteGraph(r, s, mask)
    assert parse_bipartite(format_bipartite(b)) == b


def test_predict_example(capsys):
    code, rep = run_json(capsys, "predict", "--family", "npm", "--n", "6")
    assert code == 0
    assert rep["data"]["dimension"] == 5 and rep["data"]["count"] == 9
    assert rep["data"]["tag"]
    assert set(rep) == {"command", "inputs", "data", "meta"}


def test_euler_example(capsys):
    code, rep = run_json(capsys, "euler", "--family", "bnm", "--r", "2", "--s", "2", "--k", "2")
    assert code == 0
    d = rep["data"]
    assert (d["sum"], d["predicted"], d["agree"]) == (1, 1, True)


def test_tot_example(capsys):
    code, rep = run_json(capsys, "tot", "count", "--vertices", "7")
    assert code == 0
    assert rep["data"] == {"closed_form": 225, "enumerated": 225}
    code, rep = run_json(capsys, "tot", "list", "--vertices", "5")
    assert len(rep["data"]["trees"]) == 9


def test_ge_from_file(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("5\n1 2\n2 3\n3 1\n4 5\n")
    code, rep = run_json(capsys, "ge", "--input", str(f))
    assert code == 0
    d = rep["data"]
    assert d["nu"] == 2 and d["D"] == [1, 2, 3] and d["A"] == [] and d["C"] == [4, 5]


def test_ge_bipartite(tmp_path, capsys):
    f = tmp_path / "b.txt"
    f.write_text("1 2\n1 1\n1 2\n")
    code, rep = run_json(capsys, "ge", "--bipartite", "--input", str(f))
    assert code == 0
    d = rep["data"]
    assert d["D"] == {"left": [], "right": [1, 2]} and d["A"] == {"left": [1], "right": []}


def test_homology_command(capsys):
    code, rep = run_json(capsys, "homology", "--family", "fc", "--n", "5")
    assert code == 0
    assert rep["data"]["betti"] == {"5": 9} and rep["data"]["agree"]


def test_morse_build_and_verify(tmp_path, capsys):
    out = tmp_path / "m.json"
    code, rep = run_json(capsys, "morse", "build", "--family", "bfc", "--q", "2", "--s", "4", "--emit", str(out))
    assert code == 0 and rep["data"]["agree"]
    code, rep = run_json(capsys, "morse", "verify", "--family", "bfc", "--q", "2", "--s", "4", "--input", str(out))
    assert code == 0 and rep["data"]["is_acyclic"]
    # break acyclicity by pairing a triangle boundary cyclically
    bad = {"ground": json.loads(out.read_text())["ground"], "pairs": [[3, 1], [6, 2], [5, 4]]}
    out.write_text(json.dumps(bad))
    code, rep = run_json(capsys, "morse", "verify", "--family", "bfc", "--q", "2", "--s", "4", "--input", str(out))
    assert code == 1


def test_morse_rejects_quotient_family(capsys):
    code, rep = run_json(capsys, "morse", "build", "--family", "nfc", "--n", "5")
    assert code == 2 and rep["error"]["kind"] == "usage"


@pytest.mark.parametrize("argv", [
    ["predict", "--family", "npm"],
    ["predict", "--family", "npm", "--n", "6", "--k", "2"],
    ["predict", "--family", "npm", "--n", "5"],
    ["tot", "count", "--vertices", "4"],
    ["reproduce", "--rows", "9"],
    ["euler", "--family", "nm", "--n", "5", "--k", "2", "--cap", "0"],
    ["euler", "--family", "xx", "--n", "5"],
    ["ge", "--input", "/nonexistent/graph.txt"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_usage_error_object(capsys):
    code, rep = run_json(capsys, "predict", "--family", "npm", "--n", "5")
    assert code == 2
    assert rep["error"]["kind"] == "usage" and rep["error"]["type"] == "DomainError"
    assert rep["meta"]["exit_code"] == 2


def test_parse_error_exit(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("3\n1 1\n")
    code, rep = run_json(capsys, "ge", "--input", str(f))
    assert code == 2 and "line 2" in rep["error"]["message"]


def test_resource_cap(capsys):
    code, rep = run_json(capsys, "euler", "--family", "nm", "--n", "5", "--k", "2", "--cap", "10")
    assert code == 3 and rep["error"]["kind"] == "resource"


def test_formats(capsys, tmp_path):
    code, text = run(capsys, "predict", "--family", "fc", "--n", "5", "--format", "text")
    assert "dimension: 5" in text and "count: 9" in text
    code, text = run(capsys, "predict", "--family", "fc", "--n", "5", "--format", "csv")
    assert text.splitlines()[0] == "key,value" and "count,9" in text
    out = tmp_path / "r.json"
    code, text = run(capsys, "predict", "--family", "fc", "--n", "5", "--out", str(out))
    assert text == "" and json.loads(out.read_text())["data"]["count"] == 9


def test_reproduce_subset_text(capsys):
    code, text = run(capsys, "reproduce", "--rows", "2,5", "--format", "text")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 2 and lines[0].startswith("row 2: PASS") and lines[1].startswith("row 5: PASS")


def test_data_section_is_stable(capsys):
    _, a = run_json(capsys, "homology", "--family", "nbfc", "--q", "2", "--s", "3")
    _, b = run_json(capsys, "homology", "--family", "nbfc", "--q", "2", "--s", "3", "--threads", "4")
    assert json.dumps(a["data"], sort_keys=True) == json.dumps(b["data"], sort_keys=True)


def test_render_reproduce_csv():
    rep = {"command": "reproduce", "data": {"rows": [{"row": 1, "criterion": "x", "pass": True}]}}
    assert render(rep, "csv") == "row,criterion,pass\n1,x,pass\n"
