#!/usr/bin/env python3
"""Generate the synthetic stand-in datasets shipped under tests/data.

The real Slashdot081106, Bitcoin-OTC, and Congress co-sponsorship files
are not redistributable here, so the test suite runs against synthetic
graphs calibrated to the published summary statistics: node and edge
counts, closed-triad counts, and the mean density of connected bootstrap
samples at the reference sizes.  Everything is seeded; rerunning the
script reproduces the files byte for byte.
"""

from __future__ import annotations

import csv
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from signet.datasets import bootstrap_connected_subgraph  # noqa: E402
from signet.graph import SignedGraph  # noqa: E402

DATA_DIR = Path(__file__).resolve().parents[1] / "tests" / "data"


def _adj_common(adj: list[set[int]], a: int, b: int) -> int:
    sa, sb = adj[a], adj[b]
    if len(sb) < len(sa):
        sa, sb = sb, sa
    return sum(1 for k in sa if k in sb)


def _triangles(adj: list[set[int]]) -> int:
    total = 0
    for a in range(len(adj)):
        for b in adj[a]:
            if b > a:
                total += sum(1 for k in adj[a] if k > b and k in adj[b])
    return total


def _to_graph(n, edges, signs):
    g = SignedGraph(n)
    for (a, b), s in zip(sorted(edges), signs):
        g.set_sign(a, b, s)
    return g


def _sign_list(rng, m, pos_fraction):
    n_pos = int(round(pos_fraction * m))
    signs = np.full(m, -1, dtype=int)
    signs[rng.permutation(m)[:n_pos]] = 1
    return signs.tolist()


def _tune_by_swaps(adj, edges, target, node_count, rng):
    """Remove-one/add-one swaps among the first ``node_count`` nodes until
    the triangle count hits the target exactly."""
    current = _triangles(adj)
    guard = 0
    while current != target:
        guard += 1
        if guard > 400000:
            raise RuntimeError(f"swap tuning stalled at {current} vs {target}")
        gap = target - current
        for _ in range(2000):
            a, b = rng.integers(node_count), rng.integers(node_count)
            c, d = rng.integers(node_count), rng.integers(node_count)
            if a == b or c == d:
                continue
            rem = (min(a, b), max(a, b))
            add = (min(c, d), max(c, d))
            if rem not in edges or add in edges or rem == add:
                continue
            loss = _adj_common(adj, *rem)
            edges.discard(rem)
            adj[rem[0]].discard(rem[1])
            adj[rem[1]].discard(rem[0])
            gain = _adj_common(adj, *add)
            net = gain - loss
            if (abs(gap - net) < abs(gap)) or net == gap:
                edges.add(add)
                adj[add[0]].add(add[1])
                adj[add[1]].add(add[0])
                current += net
                break
            edges.add(rem)
            adj[rem[0]].add(rem[1])
            adj[rem[1]].add(rem[0])
    return current


def build_core_periphery(n, m_target, tri_target, core_size, gateways,
                         chain_mean, blob_nodes, seed):
    """Dense core + chain periphery + a detached bipartite ballast block.

    The core carries every triangle (count tuned exactly); periphery nodes
    hang off gateway core nodes in short chains, so connected bootstrap
    samples flood the core and read off its density.  The remaining edge
    budget lives in a separate triangle-free bipartite component smaller
    than the reference sample sizes, so it contributes to the global edge
    count but never to a sample or to the triad count.
    """
    rng = np.random.default_rng(seed)
    adj = [set() for _ in range(n)]
    edges: set[tuple[int, int]] = set()

    # dense core at the density the triangle target implies
    c3 = math.comb(core_size, 3)
    q = (tri_target / c3) ** (1.0 / 3.0)
    for i in range(core_size):
        for j in range(i + 1, core_size):
            if rng.random() < q:
                edges.add((i, j))
                adj[i].add(j)
                adj[j].add(i)
    _tune_by_swaps(adj, edges, tri_target, core_size, rng)

    # periphery chains rooted at gateway core nodes
    peri = list(range(core_size, n - blob_nodes))
    pos = 0
    gate_idx = 0
    while pos < len(peri):
        length = max(1, int(rng.geometric(1.0 / chain_mean)))
        chain = peri[pos : pos + length]
        pos += length
        prev = gate_idx % gateways
        gate_idx += 1
        for v in chain:
            key = (min(prev, v), max(prev, v))
            edges.add(key)
            adj[prev].add(v)
            adj[v].add(prev)
            prev = v

    # detached bipartite ballast absorbing the leftover edge budget
    blob = list(range(n - blob_nodes, n))
    half = blob_nodes // 2
    left, right = blob[:half], blob[half:]
    budget = m_target - len(edges)
    if budget < len(blob) // 2 or budget > len(left) * len(right):
        raise RuntimeError(f"ballast cannot hold {budget} edges")
    # spanning left/right zig-zag keeps the block bipartite and connected
    order = [node for pair in zip(left, right) for node in pair]
    for idx in range(len(order) - 1):
        a, b = order[idx], order[idx + 1]
        key = (min(a, b), max(a, b))
        edges.add(key)
        adj[a].add(b)
        adj[b].add(a)
    guard = 0
    while len(edges) < m_target:
        guard += 1
        if guard > 5_000_000:
            raise RuntimeError("ballast fill stalled")
        a = left[int(rng.integers(len(left)))]
        b = right[int(rng.integers(len(right)))]
        key = (min(a, b), max(a, b))
        if key not in edges:
            edges.add(key)
            adj[a].add(b)
            adj[b].add(a)
    assert _triangles(adj) == tri_target
    assert len(edges) == m_target
    return adj, edges


def make_congress(path: Path):
    """Dense co-sponsorship stand-in: n=100, m=3696, 74140 triads."""
    n, m_target, tri_target = 100, 3696, 74140
    rng = np.random.default_rng(20260801)
    adj = [set() for _ in range(n)]
    edges: set[tuple[int, int]] = set()
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = rng.choice(len(all_pairs), size=m_target, replace=False)
    for t in chosen:
        i, j = all_pairs[t]
        edges.add((i, j))
        adj[i].add(j)
        adj[j].add(i)
    _tune_by_swaps(adj, edges, tri_target, n, rng)
    assert len(edges) == m_target and _triangles(adj) == tri_target

    signs = _sign_list(rng, m_target, 0.65)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for (a, b), s in zip(sorted(edges), signs):
            w.writerow([f"L{a:03d}", f"L{b:03d}", s])
    return _to_graph(n, edges, signs)


def make_slashdot(path: Path):
    """Sparse heavy-core stand-in: n=747, m=3065, 4268 triads."""
    n, m_target, tri_target = 747, 3065, 4268
    adj, edges = build_core_periphery(
        n, m_target, tri_target,
        core_size=53, gateways=8, chain_mean=6.0, blob_nodes=120, seed=20260802,
    )
    rng = np.random.default_rng(20260803)
    signs = _sign_list(rng, m_target, 0.77)
    with open(path, "w") as fh:
        fh.write("# synthetic stand-in; SNAP-style signed edge list\n")
        fh.write("# FromNodeId\tToNodeId\tSign\n")
        for (a, b), s in zip(sorted(edges), signs):
            fh.write(f"{a}\t{b}\t{s}\n")
    return _to_graph(n, edges, signs)


def make_bitcoin(path: Path):
    """Sparse stand-in: n=709, m=2334, 1588 triads, OTC-style ratings."""
    n, m_target, tri_target = 709, 2334, 1588
    adj, edges = build_core_periphery(
        n, m_target, tri_target,
        core_size=47, gateways=10, chain_mean=6.0, blob_nodes=100, seed=20260804,
    )
    rng = np.random.default_rng(20260805)
    signs = _sign_list(rng, m_target, 0.89)
    t0 = 1289000000
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for idx, ((a, b), s) in enumerate(zip(sorted(edges), signs)):
            rating = int(rng.integers(1, 11)) * s
            w.writerow([a + 1, b + 1, rating, t0 + 97 * idx])
    return _to_graph(n, edges, signs)


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    print("congress...", flush=True)
    gcs = make_congress(DATA_DIR / "cs_cosponsor.csv")
    print(f"  n={gcs.n} m={gcs.m} triads={gcs.count_triads()}")
    print("slashdot...", flush=True)
    gsl = make_slashdot(DATA_DIR / "sl_sample.txt")
    print(f"  n={gsl.n} m={gsl.m} triads={gsl.count_triads()}")
    print("bitcoin...", flush=True)
    gbc = make_bitcoin(DATA_DIR / "bc_sample.csv")
    print(f"  n={gbc.n} m={gbc.m} triads={gbc.count_triads()}")

    for name, g, size in (("SL", gsl, 200), ("BC", gbc, 161)):
        dens = []
        for s in range(100):
            sub = bootstrap_connected_subgraph(g, size, 10_000 + s).graph
            dens.append(sub.m / (size * (size - 1) / 2))
        print(f"  {name} bootstrap-{size} density: {np.mean(dens):.4f} +- {np.std(dens):.4f}")


if __name__ == "__main__":
    main()
