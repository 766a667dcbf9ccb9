"""Seeded generators for the four benchmark network families (ER, NCN, WS, BA).

All generators are deterministic functions of their full parameter tuple,
randomness flowing from a single PCG64 stream per call. Edge counts are exact:
ER has m edges, NCN and WS have n*k/2, BA has C(m+1, 2) + m*(n-m-1).
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .graph import Graph
from .validation import validate_seed

FAMILIES = ("ER", "NCN", "WS", "BA")


@dataclass(frozen=True)
class GenParams:
    """Generator parameters; unused fields for a family stay None.

    m is the edge count for ER and the edges-per-new-vertex for BA; k is the
    ring-neighbor count for NCN/WS; p is the WS rewiring probability.
    """

    family: str
    n: int
    m: int | None = None
    k: int | None = None
    p: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.n <= 0:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.family == "ER":
            if self.m is None or not 0 <= self.m <= self.n * (self.n - 1) // 2:
                raise ValueError(f"ER needs 0 <= m <= n(n-1)/2, got m={self.m}, n={self.n}")
        elif self.family in ("NCN", "WS"):
            if self.k is None or self.k % 2 != 0 or not 0 < self.k < self.n:
                raise ValueError(f"{self.family} needs even k with 0 < k < n, got k={self.k}, n={self.n}")
            if self.family == "WS" and (self.p is None or not 0.0 <= self.p <= 1.0):
                raise ValueError(f"WS needs 0 <= p <= 1, got p={self.p}")
        elif self.family == "BA":
            if self.m is None or not 1 <= self.m < self.n:
                raise ValueError(f"BA needs 1 <= m < n, got m={self.m}, n={self.n}")
        if self.family != "NCN":  # ring lattices are parameter-determined
            if self.seed is None:
                raise ValueError(f"{self.family} generation requires a seed")
            validate_seed(self.seed)

    def to_json(self) -> dict:
        """JSON object with keys family, n and whichever of m, k, p, seed apply."""
        return {key: value for key, value in asdict(self).items() if value is not None}

    @classmethod
    def from_json(cls, obj: dict) -> "GenParams":
        allowed = {"family", "n", "m", "k", "p", "seed"}
        unknown = set(obj) - allowed
        if unknown:
            raise ValueError(f"unknown GenParams keys: {sorted(unknown)}")
        return cls(**obj)

    def generate(self) -> Graph:
        if self.family == "ER":
            return gen_er(self.n, self.m, self.seed)
        if self.family == "NCN":
            return gen_ncn(self.n, self.k)
        if self.family == "WS":
            return gen_ws(self.n, self.k, self.p, self.seed)
        return gen_ba(self.n, self.m, self.seed)


def gen_er(n: int, m: int, seed: int) -> Graph:
    """Uniform random graph with exactly *m* distinct edges on *n* vertices."""
    params = GenParams("ER", n=n, m=m, seed=validate_seed(seed))
    rng = np.random.default_rng(params.seed)
    rows, cols = np.triu_indices(n, k=1)
    picked = rng.choice(len(rows), size=m, replace=False)
    adj = np.zeros((n, n), dtype=bool)
    adj[rows[picked], cols[picked]] = True
    return Graph(adj | adj.T)


def gen_ncn(n: int, k: int) -> Graph:
    """Ring lattice: vertex i adjacent to i +- 1, ..., i +- k/2 (mod n)."""
    GenParams("NCN", n=n, k=k)
    adj = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    for d in range(1, k // 2 + 1):
        adj[idx, (idx + d) % n] = True
    return Graph(adj | adj.T)


def gen_ws(n: int, k: int, p: float, seed: int) -> Graph:
    """Small-world rewiring of the ring lattice.

    Each lattice edge (i, i+d) is independently rewired with probability *p*:
    the i endpoint is kept and the other is redrawn uniformly among vertices
    that are neither i nor already adjacent to i. Edge count is preserved.
    """
    params = GenParams("WS", n=n, k=k, p=p, seed=validate_seed(seed))
    rng = np.random.default_rng(params.seed)
    adj = np.array(gen_ncn(n, k).adj)
    for d in range(1, k // 2 + 1):
        for i in range(n):
            if rng.random() >= p:
                continue
            j = (i + d) % n
            candidates = np.nonzero(~adj[i])[0]
            candidates = candidates[candidates != i]
            if len(candidates) == 0:
                continue  # vertex already adjacent to everyone
            w = int(candidates[rng.integers(len(candidates))])
            adj[i, j] = adj[j, i] = False
            adj[i, w] = adj[w, i] = True
    return Graph(adj)


def gen_ba(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment from an (m+1)-clique seed.

    Every new vertex attaches *m* edges to distinct existing vertices chosen
    with probability proportional to current degree.
    """
    params = GenParams("BA", n=n, m=m, seed=validate_seed(seed))
    rng = np.random.default_rng(params.seed)
    adj = np.zeros((n, n), dtype=bool)
    clique = np.arange(m + 1)
    adj[np.ix_(clique, clique)] = True
    np.fill_diagonal(adj, False)
    # One entry per degree unit; sampling uniformly from it is degree-proportional.
    repeated = [v for v in range(m + 1) for _ in range(m)]
    for v in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[rng.integers(len(repeated))])
        for t in sorted(targets):
            adj[v, t] = adj[t, v] = True
            repeated.append(t)
        repeated.extend([v] * m)
    return Graph(adj)
