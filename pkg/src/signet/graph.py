"""Signed relation storage, triad enumeration and common-neighbor sums.

Edges carry a sign in {-1, 0, +1}; 0 means "no social link".  Pairs are
stored under a canonical (min, max) key so symmetry holds by construction.
A triad is any node triple whose three pairwise signs are all nonzero.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

VALID_SIGNS = (-1, 0, 1)


class SignedGraph:
    """Symmetric ternary sign relation over nodes 0..n-1.

    Parameters
    ----------
    n : int
        Node count; node ids are dense integers below ``n``.
    dense : bool
        Keep an n-by-n int8 sign matrix alongside the pair map.  Worth it
        for (near-)complete graphs, where sign lookups and common-neighbor
        products become constant-time / vectorized.
    """

    def __init__(self, n: int, dense: bool = False):
        if n < 1:
            raise ValueError("node count must be >= 1")
        self.n = int(n)
        self._signs: dict[tuple[int, int], int] = {}
        self._adj: list[set[int]] = [set() for _ in range(self.n)]
        self._mat: np.ndarray | None = None
        if dense:
            self._mat = np.zeros((self.n, self.n), dtype=np.int8)

    @classmethod
    def complete(cls, n: int, sign: int = -1) -> "SignedGraph":
        """All-to-all graph with every edge set to ``sign`` (dense backed)."""
        g = cls(n, dense=True)
        if sign not in (-1, 1):
            raise ValueError("complete graph requires sign -1 or +1")
        for i in range(n):
            for j in range(i + 1, n):
                g.set_sign(i, j, sign)
        return g

    # -- basic accessors ------------------------------------------------

    @property
    def m(self) -> int:
        """Number of nonzero-sign edges."""
        return len(self._signs)

    def _check_pair(self, i: int, j: int) -> tuple[int, int]:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError(f"node out of range: ({i}, {j}) with n={self.n}")
        if i == j:
            raise ValueError(f"self-loop forbidden: node {i}")
        return (i, j) if i < j else (j, i)

    def get_sign(self, i: int, j: int) -> int:
        key = self._check_pair(i, j)
        if self._mat is not None:
            return int(self._mat[key])
        return self._signs.get(key, 0)

    def set_sign(self, i: int, j: int, s: int) -> None:
        if s not in VALID_SIGNS:
            raise ValueError(f"sign must be one of {VALID_SIGNS}, got {s}")
        key = self._check_pair(i, j)
        a, b = key
        if s == 0:
            if key in self._signs:
                del self._signs[key]
                self._adj[a].discard(b)
                self._adj[b].discard(a)
        else:
            self._signs[key] = s
            self._adj[a].add(b)
            self._adj[b].add(a)
        if self._mat is not None:
            self._mat[a, b] = s
            self._mat[b, a] = s

    def neighbors(self, i: int) -> frozenset[int]:
        if not 0 <= i < self.n:
            raise ValueError(f"node out of range: {i}")
        return frozenset(self._adj[i])

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield (i, j, sign) for every nonzero edge with i < j."""
        for (i, j), s in self._signs.items():
            yield i, j, s

    def positive_edge_count(self) -> int:
        return sum(1 for s in self._signs.values() if s > 0)

    def copy(self) -> "SignedGraph":
        g = SignedGraph(self.n, dense=self._mat is not None)
        g._signs = dict(self._signs)
        g._adj = [set(a) for a in self._adj]
        if self._mat is not None:
            g._mat = self._mat.copy()
        return g

    # -- triad machinery --------------------------------------------------

    def common_sign_product_sum(self, i: int, j: int) -> int:
        """Sum of sign(i,k)*sign(j,k) over all common neighbors k.

        Nodes with a zero sign to either endpoint contribute nothing, so
        the sum runs over the adjacency intersection (smaller set first).
        """
        self._check_pair(i, j)
        if self._mat is not None:
            # exact: diagonal and the (i,j) entries self-cancel via zeros
            prod = self._mat[i].astype(np.int64) @ self._mat[j].astype(np.int64)
            return int(prod)
        ai, aj = self._adj[i], self._adj[j]
        if len(aj) < len(ai):
            ai, aj = aj, ai
        total = 0
        for k in ai:
            if k != i and k != j and k in aj:
                total += self._signs[(min(i, k), max(i, k))] * self._signs[
                    (min(j, k), max(j, k))
                ]
        return total

    def enumerate_triads(self) -> Iterator[tuple[int, int, int]]:
        """Yield each closed triple (i < j < k) exactly once."""
        for (i, j) in sorted(self._signs):
            ai, aj = self._adj[i], self._adj[j]
            if len(aj) < len(ai):
                ai, aj = aj, ai
            for k in sorted(ai):
                if k > j and k in aj:
                    yield (i, j, k)

    def count_triads(self) -> int:
        total = 0
        for (i, j) in self._signs:
            ai, aj = self._adj[i], self._adj[j]
            if len(aj) < len(ai):
                ai, aj = aj, ai
            for k in ai:
                if k > j and k in aj:
                    total += 1
        return total

    # -- array export for the simulation engine ---------------------------

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (dense int8 sign matrix, edge i-array, edge j-array).

        Edges are listed with i < j in sorted order, which fixes the edge
        indexing used by the step loop.
        """
        mat = np.zeros((self.n, self.n), dtype=np.int8)
        keys = sorted(self._signs)
        ei = np.empty(len(keys), dtype=np.int64)
        ej = np.empty(len(keys), dtype=np.int64)
        for idx, (i, j) in enumerate(keys):
            s = self._signs[(i, j)]
            mat[i, j] = s
            mat[j, i] = s
            ei[idx] = i
            ej[idx] = j
        return mat, ei, ej

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "SignedGraph":
        n = mat.shape[0]
        g = cls(n, dense=True)
        ii, jj = np.nonzero(np.triu(mat, k=1))
        for i, j in zip(ii.tolist(), jj.tolist()):
            g.set_sign(i, j, int(mat[i, j]))
        return g


def triad_count_upper_bound(n: int, m: int) -> float:
    """Sharp upper bound (n/6) * (2m - n + 1)^(3/2) on the triad count."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    radicand = 2 * m - n + 1
    if radicand < 0:
        return 0.0
    return (n / 6.0) * math.pow(radicand, 1.5)
