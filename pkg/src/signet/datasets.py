"""Signed edge-list parsing, bootstrap subgraph sampling, and graph stats.

Three on-disk formats are supported:

* ``snap``: whitespace-separated ``src dst sign`` lines, ``#`` comments
  (the SNAP signed-network convention).
* ``bitcoin``: comma-separated ``SOURCE,TARGET,RATING,TIME``; the sign is
  the signum of the rating and the timestamp is ignored.
* ``generic``: comma-separated ``src,dst,sign``.

All parsers accept gzip input by extension, relabel nodes densely in
first-seen order, resolve duplicate or reciprocal records last-writer-wins,
and drop self-loops and zero-weight records with counters.
"""

from __future__ import annotations

import csv
import enum
import gzip
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import SignedGraph


class DataError(Exception):
    """Malformed or unusable dataset input."""


class DatasetFormat(enum.Enum):
    SNAP_TAB_SIGNED = "snap"
    BITCOIN_CSV = "bitcoin"
    GENERIC_CSV = "generic"


@dataclass
class DatasetSpec:
    path: str | Path
    format: DatasetFormat = DatasetFormat.GENERIC_CSV


@dataclass
class ParseReport:
    graph: SignedGraph
    labels: list[str]
    label_to_node: dict[str, int]
    n_records: int
    n_duplicates: int
    n_self_loops: int
    n_zero_weight: int


def _open_text(path: Path):
    if str(path).endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8")


def _records(path: Path, fmt: DatasetFormat):
    """Yield (line_no, src_label, dst_label, raw_weight)."""
    with _open_text(path) as fh:
        if fmt is DatasetFormat.SNAP_TAB_SIGNED:
            for ln, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise DataError(f"{path}:{ln}: expected 'src dst sign', got {line!r}")
                yield ln, parts[0], parts[1], parts[2]
        else:
            n_fields = 4 if fmt is DatasetFormat.BITCOIN_CSV else 3
            for ln, row in enumerate(csv.reader(fh), 1):
                if not row or (row[0].strip().startswith("#")):
                    continue
                if len(row) < n_fields:
                    raise DataError(
                        f"{path}:{ln}: expected {n_fields} comma-separated fields, got {row!r}"
                    )
                yield ln, row[0].strip(), row[1].strip(), row[2].strip()


def parse_edge_list(spec: DatasetSpec) -> ParseReport:
    """Parse a signed edge list into a densely-relabeled SignedGraph."""
    path = Path(spec.path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")

    labels: list[str] = []
    label_to_node: dict[str, int] = {}
    entries: dict[tuple[int, int], int] = {}
    n_records = n_dup = n_self = n_zero = 0

    def node_of(label: str) -> int:
        if label not in label_to_node:
            label_to_node[label] = len(labels)
            labels.append(label)
        return label_to_node[label]

    for ln, src, dst, raw in _records(path, spec.format):
        n_records += 1
        try:
            weight = int(float(raw))
        except ValueError as exc:
            raise DataError(f"{path}:{ln}: non-numeric weight {raw!r}") from exc
        if src == dst:
            n_self += 1
            continue
        sign = (weight > 0) - (weight < 0)
        if sign == 0:
            n_zero += 1
            continue
        a, b = node_of(src), node_of(dst)
        key = (a, b) if a < b else (b, a)
        if key in entries:
            n_dup += 1
        entries[key] = sign

    if n_records == 0:
        raise DataError(f"{path}: no edge records found")

    g = SignedGraph(len(labels))
    for (a, b), sign in entries.items():
        g.set_sign(a, b, sign)
    return ParseReport(
        graph=g,
        labels=labels,
        label_to_node=label_to_node,
        n_records=n_records,
        n_duplicates=n_dup,
        n_self_loops=n_self,
        n_zero_weight=n_zero,
    )


# -- bootstrap sampling -------------------------------------------------------


@dataclass
class BootstrapSample:
    graph: SignedGraph
    nodes: list[int]  # original node ids, in sampled order
    seed_node: int
    sample_seed: int


def _components(g: SignedGraph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(comp)
    return comps


def bootstrap_connected_subgraph(
    g: SignedGraph, size: int, rng: np.random.Generator | int
) -> BootstrapSample:
    """Connected induced subgraph of exactly ``size`` nodes.

    A seed node is drawn uniformly among nodes whose component is large
    enough; the sample then grows by repeatedly picking a uniformly random
    frontier node (a non-sampled neighbor of the sample).  Native signs are
    preserved.  Independent seeds give i.i.d. samples.
    """
    if isinstance(rng, (int, np.integer)):
        sample_seed = int(rng)
        rng = np.random.default_rng(sample_seed)
    else:
        sample_seed = -1
    if size < 1 or size > g.n:
        raise DataError(f"sample size {size} out of range 1..{g.n}")

    eligible: list[int] = []
    for comp in _components(g):
        if len(comp) >= size:
            eligible.extend(comp)
    if not eligible:
        raise DataError(f"no connected component has >= {size} nodes")

    seed_node = int(rng.choice(np.array(sorted(eligible))))
    sampled = [seed_node]
    in_sample = {seed_node}
    frontier: list[int] = []
    in_frontier = set()
    for w in sorted(g.neighbors(seed_node)):
        frontier.append(w)
        in_frontier.add(w)
    while len(sampled) < size:
        pick = int(rng.integers(len(frontier)))
        v = frontier[pick]
        frontier[pick] = frontier[-1]
        frontier.pop()
        in_frontier.discard(v)
        sampled.append(v)
        in_sample.add(v)
        for w in sorted(g.neighbors(v)):
            if w not in in_sample and w not in in_frontier:
                frontier.append(w)
                in_frontier.add(w)

    index = {orig: new for new, orig in enumerate(sampled)}
    sub = SignedGraph(size)
    for orig in sampled:
        for w in g.neighbors(orig):
            if w in index and orig < w:
                sub.set_sign(index[orig], index[w], g.get_sign(orig, w))
    return BootstrapSample(graph=sub, nodes=sampled, seed_node=seed_node, sample_seed=sample_seed)


# -- summary stats ------------------------------------------------------------


@dataclass
class GraphStats:
    n: int
    m: int
    density: float
    triads: int
    positive_fraction: float


def graph_stats(g: SignedGraph) -> GraphStats:
    possible = g.n * (g.n - 1) // 2
    pos = g.positive_edge_count()
    return GraphStats(
        n=g.n,
        m=g.m,
        density=g.m / possible if possible else 0.0,
        triads=g.count_triads(),
        positive_fraction=pos / g.m if g.m else 0.0,
    )


def write_generic_csv(g: SignedGraph, path, labels: list[str] | None = None) -> None:
    """Write a SignedGraph as ``src,dst,sign`` rows (GenericCsv)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for i, j, s in sorted(g.edges()):
            a = labels[i] if labels else i
            b = labels[j] if labels else j
            w.writerow([a, b, s])
