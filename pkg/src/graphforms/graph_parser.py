"""Graph file parser: Graph JSON and plain edge lists."""

import json
import re
from pathlib import Path

from .errors import GraphParseError, InvalidGraphError
from .graphs import Graph

_EDGE = re.compile(r"^\s*(-?\d+)\s+(-?\d+)\s*$")
_HEADER = re.compile(r"^\s*v\s+(\d+)\s*$")


def parse_edge_list(content: str, label: str | None = None) -> Graph:
    """Parse one `t h` pair per line.

    `#` starts a comment. An optional `v <count>` line fixes the vertex count;
    otherwise it is one more than the largest endpoint.

    Args:
        content: Edge list text
        label: Optional graph label

    Returns:
        The parsed graph

    Raises:
        GraphParseError: On a malformed line, with its 1-based line and column.
    """
    vertex_count: int | None = None
    edges: list[tuple[int, int]] = []
    for number, raw in enumerate(content.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        header = _HEADER.match(line)
        if header:
            if vertex_count is not None or edges:
                raise GraphParseError("vertex count must come first", number, _column(raw))
            vertex_count = int(header.group(1))
            continue
        match = _EDGE.match(line)
        if not match:
            raise GraphParseError(f"expected 't h', got {line.strip()!r}", number, _column(raw))
        t, h = int(match.group(1)), int(match.group(2))
        if t < 0 or h < 0:
            raise GraphParseError("vertex indices must be nonnegative", number, _column(raw))
        if vertex_count is not None and max(t, h) >= vertex_count:
            column = match.start(2) + 1 if h >= vertex_count else match.start(1) + 1
            raise GraphParseError(
                f"vertex {max(t, h)} is outside 0..{vertex_count - 1}", number, column
            )
        edges.append((t, h))
    if vertex_count is None:
        vertex_count = 1 + max((max(e) for e in edges), default=-1)
    return Graph(vertex_count, tuple(edges), label)


def _column(line: str) -> int:
    return len(line) - len(line.lstrip()) + 1


def _json_int(value: object, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GraphParseError(f"{where} must be an integer, got {json.dumps(value)}", 1, 1)
    return value


def parse_graph_json(content: str, label: str | None = None) -> Graph:
    """Parse the Graph JSON format `{"v": n, "edges": [[t, h], ...], "label": ...}`.

    Raises:
        GraphParseError: On invalid JSON or a malformed record.
    """
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise GraphParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from e
    if not isinstance(data, dict) or "v" not in data or "edges" not in data:
        raise GraphParseError("graph JSON needs the keys 'v' and 'edges'", 1, 1)
    vertex_count = _json_int(data["v"], "v")
    if not isinstance(data["edges"], list):
        raise GraphParseError("'edges' must be a list", 1, 1)
    edges = []
    for index, pair in enumerate(data["edges"]):
        if not isinstance(pair, list) or len(pair) != 2:
            raise GraphParseError(f"edges[{index}] must be a pair [t, h]", 1, 1)
        edges.append(
            (_json_int(pair[0], f"edges[{index}][0]"), _json_int(pair[1], f"edges[{index}][1]"))
        )
    try:
        return Graph(vertex_count, tuple(edges), data.get("label", label))
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidGraphError):
            raise GraphParseError(str(e), 1, 1) from e
        raise GraphParseError(f"malformed graph record: {e}", 1, 1) from e


def parse_graph_file(file_path: Path) -> Graph:
    """Parse a graph file; `.json` selects Graph JSON, anything else an edge list.

    Args:
        file_path: Path to the graph file

    Returns:
        The parsed graph

    Raises:
        FileNotFoundError: If file doesn't exist
        PermissionError: If file cannot be read
        GraphParseError: If the content is malformed
    """
    if not file_path.exists():
        raise FileNotFoundError(f"File not found: {file_path}")

    try:
        content = file_path.read_text()
    except PermissionError as e:
        raise PermissionError(f"Cannot read file: {file_path}") from e

    if file_path.suffix.lower() == ".json":
        return parse_graph_json(content, file_path.stem)
    return parse_edge_list(content, file_path.stem)
