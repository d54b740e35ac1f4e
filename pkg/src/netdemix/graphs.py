"""Graph construction and ingestion.

Graphs here are undirected, unweighted and immutable: a symmetric binary
adjacency matrix plus optional per-node class labels and coordinates.
Provided constructors are the random geometric generator and the
contact-record ingester; everything downstream (simulation, models) only
needs the adjacency and, for the learned models, its self-loop-normalized
form.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    IngestionError,
    InvalidArgumentError,
    InvalidSpecError,
    ParseError,
)


def _content_id(adjacency: np.ndarray) -> str:
    h = hashlib.sha256(np.ascontiguousarray(adjacency, dtype=np.uint8).tobytes())
    return h.hexdigest()[:12]


@dataclass(frozen=True)
class Graph:
    """Undirected unweighted graph on nodes 0..N-1.

    ``adjacency`` is symmetric, binary, zero-diagonal.  ``node_classes``,
    when present, assigns exactly one label per node.  ``coordinates``, when
    present, is an (N, dim) array of positions in the unit cube.
    """

    adjacency: np.ndarray
    node_classes: tuple | None = None
    coordinates: np.ndarray | None = None
    graph_id: str = ""

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"adjacency must be square, got {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise InvalidArgumentError("adjacency entries must be 0 or 1")
        if np.any(np.diagonal(a) != 0):
            raise InvalidArgumentError("adjacency must have a zero diagonal")
        if not np.array_equal(a, a.T):
            raise InvalidArgumentError("adjacency must be symmetric")
        a = np.ascontiguousarray(a, dtype=np.uint8)
        a.flags.writeable = False
        object.__setattr__(self, "adjacency", a)
        if self.node_classes is not None:
            labels = tuple(self.node_classes)
            if len(labels) != a.shape[0]:
                raise DimensionError(
                    f"node_classes has {len(labels)} labels for {a.shape[0]} nodes"
                )
            object.__setattr__(self, "node_classes", labels)
        if self.coordinates is not None:
            coords = np.asarray(self.coordinates, dtype=np.float64)
            if coords.ndim != 2 or coords.shape[0] != a.shape[0]:
                raise DimensionError(
                    f"coordinates shape {coords.shape} inconsistent with N={a.shape[0]}"
                )
            coords.flags.writeable = False
            object.__setattr__(self, "coordinates", coords)
        if not self.graph_id:
            object.__setattr__(self, "graph_id", _content_id(a))

    @property
    def num_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    @property
    def edges(self) -> set[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency))
        return set(zip(i.tolist(), j.tolist()))

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    def class_map(self) -> dict[int, object]:
        if self.node_classes is None:
            raise InvalidArgumentError("graph carries no node classes")
        return dict(enumerate(self.node_classes))


@dataclass(frozen=True)
class NormalizedAdjacency:
    """Self-loop-normalized adjacency; symmetric, non-negative, spectrum in [-1, 1]."""

    matrix: np.ndarray
    source_graph_id: str


@dataclass(frozen=True)
class RGGSpec:
    """Spec for a random geometric graph in the unit square/cube."""

    n: int
    d_r: float
    dimension: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpecError(f"node count must be >= 1, got {self.n}")
        if self.d_r < 0:
            raise InvalidSpecError(f"connection radius must be >= 0, got {self.d_r}")
        if self.dimension not in (2, 3):
            raise InvalidSpecError(f"dimension must be 2 or 3, got {self.dimension}")


def random_geometric_graph(spec: RGGSpec) -> Graph:
    """Place ``spec.n`` nodes uniformly in the unit cube and connect pairs
    within Euclidean distance ``spec.d_r``.

    Coordinates are stored on the returned graph; the construction is
    deterministic given ``spec.seed``.
    """
    rng = np.random.default_rng(spec.seed)
    coords = rng.random((spec.n, spec.dimension))
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    adj = (dist <= spec.d_r).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    return Graph(adjacency=adj, coordinates=coords)


def normalize_adjacency(g: Graph) -> NormalizedAdjacency:
    """Symmetric renormalization with self-loops.

    Degrees are taken after adding self-loops, so isolated nodes normalize
    to 1 rather than dividing by zero.
    """
    a_loop = g.adjacency.astype(np.float64) + np.eye(g.num_nodes)
    inv_sqrt_deg = 1.0 / np.sqrt(a_loop.sum(axis=1))
    matrix = a_loop * inv_sqrt_deg[:, None] * inv_sqrt_deg[None, :]
    return NormalizedAdjacency(matrix=matrix, source_graph_id=g.graph_id)


def induced_subgraph(g: Graph, keep: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph on ``keep``, re-indexed 0..k-1 in sorted old-index order.

    Returns the subgraph and the old->new index mapping.  Classes and
    coordinates are carried over.
    """
    keep = sorted(set(int(i) for i in keep))
    if not keep:
        raise InvalidArgumentError("keep must be a non-empty node subset")
    if keep[0] < 0 or keep[-1] >= g.num_nodes:
        raise InvalidArgumentError(f"keep contains nodes outside 0..{g.num_nodes - 1}")
    idx = np.array(keep, dtype=np.int64)
    sub = g.adjacency[np.ix_(idx, idx)]
    classes = None
    if g.node_classes is not None:
        classes = tuple(g.node_classes[i] for i in keep)
    coords = None
    if g.coordinates is not None:
        coords = g.coordinates[idx]
    mapping = {old: new for new, old in enumerate(keep)}
    return Graph(adjacency=sub, node_classes=classes, coordinates=coords), mapping


# ---------------------------------------------------------------------------
# Contact-record ingestion (SocioPatterns-style daily face-to-face contacts)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactRecord:
    """One face-to-face contact event between two individuals."""

    timestamp: int
    i: int
    j: int
    class_i: str
    class_j: str


def load_contact_graph(records: Iterable[ContactRecord], min_contacts: int = 5) -> Graph:
    """Build a daily contact graph from contact events.

    An undirected edge is added for a pair iff that pair appears in strictly
    more than ``min_contacts`` events.  Nodes that end up with no qualifying
    edge are dropped; the remaining nodes are re-indexed in sorted order of
    their original ids and carry their class labels.
    """
    pair_counts: dict[tuple[int, int], int] = {}
    classes: dict[int, str] = {}
    for rec in records:
        for node, label in ((rec.i, rec.class_i), (rec.j, rec.class_j)):
            prev = classes.get(node)
            if prev is None:
                classes[node] = label
            elif prev != label:
                raise IngestionError(
                    f"node {node} appears with class {prev!r} and {label!r}"
                )
        if rec.i == rec.j:
            raise IngestionError(f"self-contact for node {rec.i}")
        pair = (min(rec.i, rec.j), max(rec.i, rec.j))
        pair_counts[pair] = pair_counts.get(pair, 0) + 1

    edges = [p for p, c in pair_counts.items() if c > min_contacts]
    connected = sorted({n for p in edges for n in p})
    if not connected:
        raise IngestionError("no pair exceeds the contact threshold")
    index = {old: new for new, old in enumerate(connected)}
    n = len(connected)
    adj = np.zeros((n, n), dtype=np.uint8)
    for a, b in edges:
        adj[index[a], index[b]] = 1
        adj[index[b], index[a]] = 1
    labels = tuple(classes[old] for old in connected)
    return Graph(adjacency=adj, node_classes=labels)


def graph_to_contact_records(g: Graph, min_contacts: int = 5) -> list[ContactRecord]:
    """Serialize a class-labeled graph back into contact records.

    Each edge is emitted ``min_contacts + 1`` times so that re-ingestion at
    the same threshold reproduces the graph exactly.
    """
    if g.node_classes is None:
        raise InvalidArgumentError("graph carries no node classes")
    records = []
    t = 0
    for i, j in sorted(g.edges):
        for _ in range(min_contacts + 1):
            records.append(
                ContactRecord(t, i, j, str(g.node_classes[i]), str(g.node_classes[j]))
            )
            t += 20
    return records


def _sniff_delimiter(sample_line: str) -> str:
    return "\t" if "\t" in sample_line else ","


def parse_contact_records(text_stream) -> list[ContactRecord]:
    """Parse ``timestamp,i,j,class_i,class_j`` rows (tab- or comma-separated)."""
    records = []
    delim = None
    for lineno, raw in enumerate(text_stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if delim is None:
            delim = _sniff_delimiter(line)
        parts = line.split(delim)
        if len(parts) != 5:
            raise ParseError(f"expected 5 fields, got {len(parts)}", line=lineno)
        try:
            t, i, j = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        records.append(ContactRecord(t, i, j, parts[3], parts[4]))
    if not records:
        raise ParseError("no contact records found")
    return records


def load_contact_csv(path, min_contacts: int = 5) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        records = parse_contact_records(fh)
    return load_contact_graph(records, min_contacts=min_contacts)


def write_contact_csv(records: Sequence[ContactRecord], path, delimiter=",") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        for r in records:
            writer.writerow([r.timestamp, r.i, r.j, r.class_i, r.class_j])


# ---------------------------------------------------------------------------
# Edge-list / node-metadata CSV
# ---------------------------------------------------------------------------

def write_edge_list(g: Graph, path) -> None:
    """Edge-list CSV: header ``i,j``, one undirected edge per line, i < j."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j"])
        for i, j in sorted(g.edges):
            writer.writerow([i, j])


def read_edge_list(path, num_nodes: int | None = None) -> np.ndarray:
    """Read an edge-list CSV into a symmetric adjacency matrix."""
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["i", "j"]:
            raise ParseError("edge-list CSV must start with header 'i,j'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, j = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise ParseError(f"bad edge row {row!r}", line=lineno) from None
            edges.append((i, j))
    n = num_nodes
    if n is None:
        n = max((max(i, j) for i, j in edges), default=-1) + 1
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        adj[i, j] = 1
        adj[j, i] = 1
    return adj


def write_node_metadata(g: Graph, path) -> None:
    """Node-metadata CSV: ``node,class,x,y,z`` with empty fields when absent."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "class", "x", "y", "z"])
        for node in range(g.num_nodes):
            label = "" if g.node_classes is None else g.node_classes[node]
            coords = ["", "", ""]
            if g.coordinates is not None:
                for d in range(g.coordinates.shape[1]):
                    coords[d] = repr(float(g.coordinates[node, d]))
            writer.writerow([node, label, *coords])


def read_node_metadata(path) -> tuple[tuple | None, np.ndarray | None, int]:
    """Read a node-metadata CSV; returns (classes, coordinates, num_nodes)."""
    labels, coords = [], []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["node", "class", "x", "y", "z"]:
            raise ParseError("node-metadata CSV must start with 'node,class,x,y,z'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(f"expected 5 fields, got {len(row)}", line=lineno)
            labels.append(row[1])
            coords.append([row[2], row[3], row[4]])
    classes = tuple(labels) if any(lab != "" for lab in labels) else None
    coordinates = None
    if coords and coords[0][0] != "":
        dims = sum(1 for c in coords[0] if c != "")
        coordinates = np.array(
            [[float(c[d]) for d in range(dims)] for c in coords], dtype=np.float64
        )
    return classes, coordinates, len(labels)


def write_graph(g: Graph, directory) -> None:
    """Write ``edges.csv`` and ``nodes.csv`` for a graph into a directory."""
    import os

    os.makedirs(directory, exist_ok=True)
    write_edge_list(g, os.path.join(directory, "edges.csv"))
    write_node_metadata(g, os.path.join(directory, "nodes.csv"))


def read_graph(directory) -> Graph:
    import os

    classes, coords, n = read_node_metadata(os.path.join(directory, "nodes.csv"))
    adj = read_edge_list(os.path.join(directory, "edges.csv"), num_nodes=n)
    return Graph(adjacency=adj, node_classes=classes, coordinates=coords)
