"""Canonical motif decomposition trees built from 3- and 4-ary groupings.

A tree is a plain nested tuple whose leaves are the integer 1, e.g. the
seven-vertex decomposition ((1,1,1),(1,1,1),1). Internal nodes always have
arity 3 or 4, and the leaf count equals the represented vertex count.
"""

from __future__ import annotations

import ast
from typing import Union

MotifTree = Union[int, tuple]

LEAF: MotifTree = 1

_BASE_TREES: dict[int, MotifTree] = {
    3: (1, 1, 1),
    4: (1, 1, 1, 1),
    # Smallest 5-vertex tree honoring the arity-{3,4} constraint.
    5: ((1, 1, 1), 1, 1),
}


def validate_mim(tree) -> bool:
    """True iff *tree* is a leaf or every internal node has arity 3 or 4."""
    if type(tree) is int:  # bools and other 1-like values are not leaves
        return tree == LEAF
    if not isinstance(tree, tuple) or len(tree) not in (3, 4):
        return False
    return all(validate_mim(child) for child in tree)


def leaf_count(tree: MotifTree) -> int:
    """Number of leaves, i.e. the vertex count the tree represents."""
    if tree == LEAF:
        return 1
    if not isinstance(tree, tuple):
        raise ValueError(f"not a motif tree node: {tree!r}")
    return sum(leaf_count(child) for child in tree)


def depth(tree: MotifTree) -> int:
    """Motif level: 0 for a leaf, 1 + max child depth for internal nodes."""
    if tree == LEAF:
        return 0
    return 1 + max(depth(child) for child in tree)


def smim_successor(tree: MotifTree) -> MotifTree:
    """Grow a canonical tree by one vertex.

    A 3-ary root gains a fourth leaf. A 4-ary root is regrouped by how many of
    its children are internal nodes; the remaining children must be leaves:

    * one internal node a:        ((1,1,1), a, 1)
    * two internal nodes a, b:    (a, b, (1,1,1))
    * three internal nodes:       ((a, b, c), 1, 1)
    * four internal nodes:        ((a, b, c), d, 1)

    The single-internal case puts the fresh triple first; that ordering is
    what makes the canonical 13-vertex tree come out as
    ((1,1,1),((1,1,1),(1,1,1),(1,1,1)),1).
    """
    if not validate_mim(tree) or tree == LEAF:
        raise ValueError(f"not an internal motif tree: {tree!r}")
    if len(tree) == 3:
        return (*tree, 1)
    if tree == (1, 1, 1, 1):
        return _BASE_TREES[5]
    internal = [child for child in tree if child != LEAF]
    if len(internal) == 1:
        return ((1, 1, 1), internal[0], 1)
    if len(internal) == 2:
        return (internal[0], internal[1], (1, 1, 1))
    if len(internal) == 3:
        return ((internal[0], internal[1], internal[2]), 1, 1)
    return ((tree[0], tree[1], tree[2]), tree[3], 1)


def smim_decompose(k: int) -> MotifTree:
    """Canonical decomposition tree for *k* vertices (k >= 3)."""
    if k < 3:
        raise ValueError(f"decomposition needs at least 3 vertices, got {k}")
    tree = _BASE_TREES[3]
    for _ in range(3, k):
        tree = smim_successor(tree)
    return tree


def top_arity_sequence(ks) -> list[int]:
    """Root arity of the canonical tree for each k in *ks*."""
    return [len(smim_decompose(k)) for k in ks]


def format_tree(tree: MotifTree) -> str:
    """Nested parenthesized text, e.g. ``((1,1,1),1,1)``."""
    if tree == LEAF:
        return "1"
    if not isinstance(tree, tuple):
        raise ValueError(f"not a motif tree node: {tree!r}")
    return "(" + ",".join(format_tree(child) for child in tree) + ")"


def parse_tree(text: str) -> MotifTree:
    """Inverse of :func:`format_tree`; rejects non-tree input."""
    try:
        tree = ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise ValueError(f"unparseable motif tree: {text!r}") from exc
    if not validate_mim(tree):
        raise ValueError(f"not a valid motif tree: {text!r}")
    return tree
