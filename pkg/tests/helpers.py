"""Shared generators for randomized tests."""

from __future__ import annotations

import random

from vsr.trees import CleanNode, NodeKind

# A small pool keeps kind collisions frequent so greedy matching has real
# work to do; fully distinct kinds would make every score trivially 0.
SMALL_POOL = (
    NodeKind.MODULE_DEF,
    NodeKind.ALWAYS,
    NodeKind.ID,
    NodeKind.CONST,
    NodeKind.PLUS,
)

ALL_KINDS = tuple(NodeKind)


def random_clean_tree(
    rng: random.Random,
    max_depth: int = 6,
    max_children: int = 4,
    pool: tuple[NodeKind, ...] = SMALL_POOL,
) -> CleanNode:
    kind = pool[rng.randrange(len(pool))]
    if max_depth <= 1:
        return CleanNode(kind, ())
    count = rng.randrange(max_children + 1)
    return CleanNode(
        kind,
        tuple(
            random_clean_tree(rng, max_depth - 1, max_children, pool)
            for _ in range(count)
        ),
    )


def permute_tree(node: CleanNode, rng: random.Random) -> CleanNode:
    """Recursively shuffle child order everywhere; nothing else changes."""
    kids = [permute_tree(c, rng) for c in node.children]
    for i in range(len(kids) - 1, 0, -1):
        j = rng.randrange(i + 1)
        kids[i], kids[j] = kids[j], kids[i]
    return CleanNode(node.kind, tuple(kids))


def perturb_tree(node: CleanNode, rng: random.Random) -> CleanNode:
    """One random local edit: retag, drop a child, or graft a leaf."""
    choice = rng.randrange(3)
    kids = list(node.children)
    if choice == 0:
        return CleanNode(SMALL_POOL[rng.randrange(len(SMALL_POOL))], node.children)
    if choice == 1 and kids:
        del kids[rng.randrange(len(kids))]
        return CleanNode(node.kind, tuple(kids))
    kids.insert(
        rng.randrange(len(kids) + 1),
        CleanNode(SMALL_POOL[rng.randrange(len(SMALL_POOL))], ()),
    )
    return CleanNode(node.kind, tuple(kids))


def perturb_somewhere(node: CleanNode, rng: random.Random) -> CleanNode:
    """Apply perturb_tree at a random position in the tree."""
    if not node.children or rng.random() < 0.3:
        return perturb_tree(node, rng)
    kids = list(node.children)
    idx = rng.randrange(len(kids))
    kids[idx] = perturb_somewhere(kids[idx], rng)
    return CleanNode(node.kind, tuple(kids))


def wide_module(assign_count: int, name: str = "gen_block") -> str:
    """Synthesize a parsable module of roughly assign_count + 4 lines."""
    lines = [f"module {name}("]
    lines.append("    input [7:0] seed,")
    lines.append(f"    output [7:0] out_{assign_count - 1}")
    lines.append(");")
    for i in range(assign_count - 1):
        lines.append(f"    wire [7:0] out_{i};")
    prev = "seed"
    for i in range(assign_count):
        lines.append(f"    assign out_{i} = {prev} ^ 8'd{i % 251};")
        prev = f"out_{i}"
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
