"""Tests for the graph file parser."""

from pathlib import Path

import pytest

from graphforms.errors import GraphParseError
from graphforms.graph_parser import parse_edge_list, parse_graph_file, parse_graph_json
from graphforms.graphs import Graph, wheel


def test_parse_edge_list_basic():
    """Test parsing a plain edge list."""
    content = """
# triangle
0 1
1 2
2 0
"""
    g = parse_edge_list(content)
    assert g == Graph(3, ((0, 1), (1, 2), (2, 0)))


def test_parse_edge_list_header():
    """Test that a vertex count line keeps isolated vertices."""
    g = parse_edge_list("v 4\n0 1\n0 1  # doubled\n")
    assert g.vertex_count == 4
    assert g.edges == ((0, 1), (0, 1))


def test_parse_edge_list_empty():
    """Test that an empty file is the empty graph."""
    assert parse_edge_list("").is_empty


def test_parse_edge_list_bad_line():
    """Test line and column of a malformed line."""
    with pytest.raises(GraphParseError) as info:
        parse_edge_list("0 1\n  1 x\n")
    assert info.value.line == 2
    assert info.value.column == 3
    assert "line 2" in str(info.value)


def test_parse_edge_list_vertex_out_of_range():
    """Test that endpoints must respect the declared vertex count."""
    with pytest.raises(GraphParseError) as info:
        parse_edge_list("v 2\n0 5\n")
    assert info.value.line == 2
    assert info.value.column == 3


def test_parse_edge_list_late_header():
    """Test that the vertex count must come first."""
    with pytest.raises(GraphParseError):
        parse_edge_list("0 1\nv 3\n")


def test_parse_edge_list_negative():
    """Test that negative vertices are rejected."""
    with pytest.raises(GraphParseError):
        parse_edge_list("0 -1\n")


def test_parse_graph_json():
    """Test the Graph JSON format."""
    g = parse_graph_json('{"v": 3, "edges": [[0, 1], [1, 2]], "label": "P3"}')
    assert g == Graph(3, ((0, 1), (1, 2)))
    assert g.label == "P3"


@pytest.mark.parametrize(
    "content",
    [
        "{not json",
        '{"edges": []}',
        '{"v": 2, "edges": [[0, 1, 2]]}',
        '{"v": 2, "edges": [[0, 3]]}',
        '{"v": 2.5, "edges": [[0, 1]]}',
        '{"v": 3, "edges": [[0, 1.9], [1, 2]]}',
        '{"v": 2, "edges": [[0, true]]}',
        '{"v": "2", "edges": [[0, 1]]}',
        "[1, 2]",
    ],
)
def test_parse_graph_json_malformed(content):
    """Test that malformed Graph JSON is a parse error."""
    with pytest.raises(GraphParseError):
        parse_graph_json(content)


def test_parse_graph_file_json(tmp_path):
    """Test that .json files are read as Graph JSON and named after the file."""
    path = tmp_path / "w3.json"
    path.write_text('{"v": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[2,3],[3,1]]}')
    g = parse_graph_file(path)
    assert g == wheel(3)
    assert g.label == "w3"


def test_parse_graph_file_edge_list(tmp_path):
    """Test that other files are read as edge lists."""
    path = tmp_path / "banana.txt"
    path.write_text("0 1\n0 1\n0 1\n")
    g = parse_graph_file(path)
    assert g.edge_count == 3
    assert g.loop_number == 2


def test_parse_graph_file_not_found():
    """Test parsing a missing file."""
    with pytest.raises(FileNotFoundError):
        parse_graph_file(Path("nonexistent.txt"))


def test_parse_graph_json_names_bad_value():
    """Test that a non-integer endpoint is reported by its position."""
    with pytest.raises(GraphParseError) as info:
        parse_graph_json('{"v": 3, "edges": [[0, 1], [1, 2.0]]}')
    assert "edges[1][1]" in str(info.value)
