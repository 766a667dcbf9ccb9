"""Two-phase vertex reordering: degree-descending adjacency-prioritized
placement, then a symmetric rearrangement that centers high-degree vertices.

Phase 1 walks the degree classes from highest to lowest. Inside a class the
next vertex is preferably one adjacent to the most recently placed vertex
(smallest index on ties); failing that, a seeded-random member of the class.
The same preference applies when a new class starts, so chains can continue
across class boundaries.

Phase 2 reverses the odd 1-based positions of the placement in front of the
even ones: [x1..xn] becomes [.., x5, x3, x1, x2, x4, ..]. The first-placed
(maximum-degree) vertex lands at index ceil(n/2) - 1, the middle of the list.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, apply_order
from .validation import validate_seed


@dataclass(frozen=True)
class VraTrace:
    """Intermediate and final state of one reordering run."""

    degree_classes: tuple[int, ...]
    omega_snapshots: tuple[tuple[int, tuple[int, ...]], ...]
    placement: tuple[int, ...]
    final: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "degree_classes": list(self.degree_classes),
            "omega_snapshots": [
                {"degree": d, "members": list(members)} for d, members in self.omega_snapshots
            ],
            "placement": list(self.placement),
            "final": list(self.final),
        }


def center_arrange(placement) -> tuple[int, ...]:
    """Move odd 1-based positions to the front in turn: [..,x3,x1,x2,x4,..]."""
    seq = list(placement)
    return tuple(seq[0::2][::-1] + seq[1::2])


def vra_order(g: Graph, seed: int = 0) -> VraTrace:
    """Compute the reordering for *g*; deterministic given (g, seed)."""
    rng = np.random.default_rng(validate_seed(seed))
    deg = np.count_nonzero(g.adj, axis=1)
    classes = tuple(np.unique(deg)[::-1].tolist())

    placement: list[int] = []
    snapshots = []
    for d in classes:
        omega = np.nonzero(deg == d)[0]
        snapshots.append((int(d), tuple(omega.tolist())))
        remaining = np.zeros(g.n, dtype=bool)
        remaining[omega] = True
        left = len(omega)
        while left:
            nxt = None
            if placement:
                adjacent = np.nonzero(g.adj[placement[-1]] & remaining)[0]
                if len(adjacent):
                    nxt = int(adjacent[0])  # smallest index on ties
            if nxt is None:
                pool = np.nonzero(remaining)[0]
                nxt = int(pool[rng.integers(left)])
            placement.append(nxt)
            remaining[nxt] = False
            left -= 1

    return VraTrace(
        degree_classes=classes,
        omega_snapshots=tuple(snapshots),
        placement=tuple(placement),
        final=center_arrange(placement),
    )


def vra_apply(g: Graph, seed: int = 0) -> Graph:
    """Relabel *g* by the computed order; always isomorphic to the input."""
    return apply_order(g, np.array(vra_order(g, seed).final, dtype=np.intp))


def diag_concentration(g: Graph) -> float:
    """Mean |i - j| / (n - 1) over white (edge) pixels; in (0, 1].

    Lower values mean edge pixels hug the main diagonal. Undefined for
    edgeless graphs.
    """
    iu, ju = np.nonzero(g.adj)
    if len(iu) == 0:
        raise ValueError("diagonal concentration is undefined for an edgeless graph")
    return float(np.abs(iu - ju).mean() / (g.n - 1))
