"""Immutable simple undirected graphs and their ingestion.

Two text formats are supported:

* edge lists: one edge per line as two whitespace-separated vertex
  tokens; ``#`` starts a comment line.
* a GML subset: ``graph [ node [ id K ... ] ... edge [ source A
  target B ... ] ... ]`` with unknown keys (including nested blocks)
  skipped.

Both loaders normalize to the same representation: vertex tokens are
remapped to dense ids ``0..n-1`` in first-appearance order, self-loops
are dropped, and parallel edges are deduplicated.  Everything dropped is
tallied in a :class:`LoadReport` so callers can surface it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterator, TextIO


class GraphParseError(ValueError):
    """A graph file could not be parsed; carries the offending line."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


@dataclass(frozen=True)
class LoadReport:
    """What ingestion had to normalize away."""

    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0
    symmetrized: bool = False
    weights_ignored: bool = False


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph in adjacency-list form.

    Attributes:
        n: vertex count; vertex ids are dense in [0, n).
        m: edge count.
        adjacency: per-vertex sorted tuple of neighbor ids.
        external_names: original vertex identifiers in id order, when the
            graph came from a file; None for programmatically built graphs.

    Instances are immutable after construction and safe for concurrent
    reads.  The constructor validates simplicity and symmetry, so every
    Graph in circulation satisfies the representation invariants.
    """

    n: int
    m: int
    adjacency: tuple[tuple[int, ...], ...]
    external_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.n != len(self.adjacency):
            raise ValueError("n does not match adjacency length")
        if self.external_names is not None and len(self.external_names) != self.n:
            raise ValueError("external_names length does not match n")
        half_degrees = 0
        for v, neigh in enumerate(self.adjacency):
            half_degrees += len(neigh)
            prev = -1
            for u in neigh:
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
                if u <= prev:
                    raise ValueError(f"adjacency of {v} not sorted/duplicate-free")
                if not 0 <= u < self.n:
                    raise ValueError(f"neighbor {u} of {v} out of range")
                prev = u
        if half_degrees != 2 * self.m:
            raise ValueError("m inconsistent with adjacency lists")
        for v, neigh in enumerate(self.adjacency):
            for u in neigh:
                if v not in self.adjacency[u]:
                    raise ValueError(f"edge {{{u}, {v}}} not symmetric")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: "list[tuple[int, int]] | set[tuple[int, int]]",
        external_names: tuple[str, ...] | None = None,
    ) -> "Graph":
        """Build a Graph from clean (no loops, no duplicates) edge pairs."""
        neigh: list[list[int]] = [[] for _ in range(n)]
        count = 0
        for u, v in edges:
            neigh[u].append(v)
            neigh[v].append(u)
            count += 1
        return cls(
            n=n,
            m=count,
            adjacency=tuple(tuple(sorted(a)) for a in neigh),
            external_names=external_names,
        )

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v, in sorted order."""
        for v, neigh in enumerate(self.adjacency):
            for u in neigh:
                if u > v:
                    yield (v, u)

    def name_of(self, v: int) -> str:
        if self.external_names is not None:
            return self.external_names[v]
        return str(v)


def _tokens(source: "str | TextIO") -> Iterator[tuple[int, str]]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    for lineno, raw in enumerate(stream, start=1):
        yield lineno, raw


class _EdgeAccumulator:
    """Shared normalization: dense remap, self-loop and duplicate drops."""

    def __init__(self) -> None:
        self.ids: dict[str, int] = {}
        self.names: list[str] = []
        self.edges: set[tuple[int, int]] = set()
        self.self_loops = 0
        self.duplicates = 0

    def vertex(self, token: str) -> int:
        vid = self.ids.get(token)
        if vid is None:
            vid = len(self.names)
            self.ids[token] = vid
            self.names.append(token)
        return vid

    def fresh_vertex(self, name: str) -> int:
        # GML nodes are distinct even when their display labels collide.
        vid = len(self.names)
        self.names.append(name)
        return vid

    def edge(self, u: int, v: int) -> None:
        if u == v:
            self.self_loops += 1
            return
        key = (u, v) if u < v else (v, u)
        if key in self.edges:
            self.duplicates += 1
        else:
            self.edges.add(key)

    def build(self, *, symmetrized: bool = False, weights_ignored: bool = False) -> tuple[Graph, LoadReport]:
        if not self.names:
            raise GraphParseError("empty graph: no vertices found")
        graph = Graph.from_edges(
            len(self.names), self.edges, external_names=tuple(self.names)
        )
        report = LoadReport(
            self_loops_dropped=self.self_loops,
            duplicate_edges_dropped=self.duplicates,
            symmetrized=symmetrized,
            weights_ignored=weights_ignored,
        )
        return graph, report


def load_edge_list(source: "str | TextIO") -> tuple[Graph, LoadReport]:
    """Parse edge-list text into a Graph plus its normalization report.

    Each non-empty, non-``#`` line must hold exactly two whitespace
    separated vertex tokens.  Tokens become dense ids in first-appearance
    order; the original tokens are retained as ``external_names``.

    Raises:
        GraphParseError: a line does not hold exactly two tokens, or the
            input contains no vertices at all.
    """
    acc = _EdgeAccumulator()
    for lineno, raw in _tokens(source):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(
                f"expected two vertex tokens, got {len(parts)}", line=lineno
            )
        acc.edge(acc.vertex(parts[0]), acc.vertex(parts[1]))
    return acc.build()


def dump_edge_list(graph: Graph) -> str:
    """Serialize a Graph so that reloading reproduces identical dense ids.

    Lines are grouped by the larger endpoint in ascending order, which
    makes vertices first appear in id order.  A vertex with no smaller
    neighbor is introduced by a ``v v`` marker line; the loader drops the
    self-loop but keeps the vertex, so isolated vertices survive the
    round trip.
    """
    out: list[str] = []
    for v in range(graph.n):
        name = graph.name_of(v)
        if not any(u < v for u in graph.adjacency[v]):
            out.append(f"{name} {name}")
        for u in graph.adjacency[v]:
            if u < v:
                out.append(f"{graph.name_of(u)} {name}")
    return "\n".join(out) + "\n"


# --- GML subset -----------------------------------------------------------

_GML_INTERESTING_EDGE_KEYS = {"source", "target"}
_GML_WEIGHT_KEYS = {"weight", "value"}


def _gml_tokenize(source: "str | TextIO") -> Iterator[tuple[str, str, int]]:
    """Yield (kind, text, line) with kind in {'atom', 'string', 'open', 'close'}."""
    for lineno, raw in _tokens(source):
        rest = raw
        while rest:
            rest = rest.lstrip()
            if not rest:
                break
            ch = rest[0]
            if ch == "[":
                yield "open", "[", lineno
                rest = rest[1:]
            elif ch == "]":
                yield "close", "]", lineno
                rest = rest[1:]
            elif ch == '"':
                end = rest.find('"', 1)
                if end < 0:
                    raise GraphParseError("unterminated string", line=lineno)
                yield "string", rest[1:end], lineno
                rest = rest[end + 1 :]
            elif ch == "#":
                break
            else:
                cut = len(rest)
                for stop in (" ", "\t", "[", "]", '"', "\n", "\r"):
                    pos = rest.find(stop)
                    if 0 <= pos < cut:
                        cut = pos
                yield "atom", rest[:cut], lineno
                rest = rest[cut:]


def _gml_parse_block(
    tokens: "list[tuple[str, str, int]]",
    pos: int,
    *,
    top: bool,
    opened_at: int,
) -> tuple[list[tuple[str, object, int]], int]:
    """Parse key/value pairs until the matching ']'; values are scalars or sub-blocks."""
    entries: list[tuple[str, object, int]] = []
    while pos < len(tokens):
        kind, text, lineno = tokens[pos]
        if kind == "close":
            if top:
                raise GraphParseError("unbalanced brackets: stray ']'", line=lineno)
            return entries, pos + 1
        if kind != "atom":
            raise GraphParseError(f"expected a key, got {text!r}", line=lineno)
        key = text
        pos += 1
        if pos >= len(tokens):
            raise GraphParseError(f"key {key!r} has no value", line=lineno)
        vkind, vtext, vline = tokens[pos]
        if vkind == "open":
            sub, pos = _gml_parse_block(tokens, pos + 1, top=False, opened_at=vline)
            entries.append((key, sub, lineno))
        elif vkind == "close":
            raise GraphParseError(f"key {key!r} has no value", line=lineno)
        else:
            entries.append((key, vtext, lineno))
            pos += 1
    if not top:
        raise GraphParseError("unbalanced brackets: block never closed", line=opened_at)
    return entries, pos


def load_gml(source: "str | TextIO") -> tuple[Graph, LoadReport]:
    """Parse the GML subset used by the public community-detection datasets.

    Recognized keys: ``graph``, ``node`` (``id``, ``label``), ``edge``
    (``source``, ``target``), and ``directed``.  Edge weights are parsed
    but ignored (flagged in the report); a ``directed 1`` declaration is
    accepted and the edges are symmetrized (also flagged).  Anything else
    is skipped.
    """
    tokens = list(_gml_tokenize(source))
    entries, _ = _gml_parse_block(tokens, 0, top=True, opened_at=0)

    graph_block: list[tuple[str, object, int]] | None = None
    for key, value, lineno in entries:
        if key == "graph" and isinstance(value, list):
            graph_block = value
            break
    if graph_block is None:
        raise GraphParseError("no 'graph [ ... ]' block found")

    acc = _EdgeAccumulator()
    id_to_vertex: dict[str, int] = {}
    directed = False
    weights_seen = False
    pending_edges: list[tuple[str, str, int]] = []

    for key, value, lineno in graph_block:
        if key == "directed" and not isinstance(value, list):
            directed = str(value).strip() == "1"
        elif key == "node" and isinstance(value, list):
            node_id: str | None = None
            label: str | None = None
            for nkey, nvalue, nline in value:
                if nkey == "id" and not isinstance(nvalue, list):
                    node_id = str(nvalue)
                elif nkey == "label" and not isinstance(nvalue, list):
                    label = str(nvalue)
            if node_id is None:
                raise GraphParseError("node block missing 'id'", line=lineno)
            if node_id in id_to_vertex:
                raise GraphParseError(f"duplicate node id {node_id}", line=lineno)
            vid = acc.fresh_vertex(label if label is not None else node_id)
            id_to_vertex[node_id] = vid
        elif key == "edge" and isinstance(value, list):
            src: str | None = None
            dst: str | None = None
            for ekey, evalue, eline in value:
                if isinstance(evalue, list):
                    continue
                if ekey == "source":
                    src = str(evalue)
                elif ekey == "target":
                    dst = str(evalue)
                elif ekey in _GML_WEIGHT_KEYS:
                    weights_seen = True
            if src is None or dst is None:
                raise GraphParseError("edge block missing source/target", line=lineno)
            pending_edges.append((src, dst, lineno))

    for src, dst, lineno in pending_edges:
        if src not in id_to_vertex:
            raise GraphParseError(f"edge references undeclared node {src}", line=lineno)
        if dst not in id_to_vertex:
            raise GraphParseError(f"edge references undeclared node {dst}", line=lineno)
        acc.edge(id_to_vertex[src], id_to_vertex[dst])

    return acc.build(symmetrized=directed, weights_ignored=weights_seen)
