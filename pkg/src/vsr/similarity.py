"""Order-insensitive and sequential tree similarity over cleaned ASTs.

`sim_ast` scores two trees in [0, 1].  Nodes of different kinds score 0.
Nodes of the same kind greedily match children one-to-one: each left child
takes the highest-scoring unmatched right child of the same kind (first one
wins on ties, both sides visited in document order), and the matched scores
are summed and divided by max(len(left children), len(right children)).
Two leaves of the same kind score 1.  The greedy pairing makes the measure
insensitive to child order but still linear in how much structure agrees;
it is not symmetric in general.

`sim_ast_seq` is the sequential variant: children are paired strictly by
position instead of greedily, everything else is identical.  Reordering
semantically equivalent items lowers this score, which is exactly what it
exists to show.

Both walk the trees iteratively and reject inputs deeper than a configured
limit instead of overflowing the interpreter stack.
"""

from __future__ import annotations

from dataclasses import dataclass

from vsr.parser import Validity, classify
from vsr.trees import CleanNode, clean

DEFAULT_DEPTH_LIMIT = 512


class DepthLimitError(RuntimeError):
    """Input tree is deeper than the configured limit."""


@dataclass(frozen=True)
class MatchStep:
    """One greedy child match: paths are child-index tuples from the root."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    score: float


def _depth(tree: CleanNode) -> int:
    deepest = 0
    stack = [(tree, 1)]
    while stack:
        node, level = stack.pop()
        if level > deepest:
            deepest = level
        for child in node.children:
            stack.append((child, level + 1))
    return deepest


def _check_depth(t1: CleanNode, t2: CleanNode, limit: int) -> None:
    if limit < 1:
        raise ValueError(f"depth limit must be >= 1, got {limit}")
    for tree in (t1, t2):
        d = _depth(tree)
        if d > limit:
            raise DepthLimitError(f"tree depth {d} exceeds limit {limit}")


def _greedy_row(a: CleanNode, b: CleanNode, scores) -> tuple[float, list[int]]:
    """Greedy one-to-one child matching for one node pair.

    Returns (score sum, chosen right index per left child; -1 for no match).
    Accumulation order is fixed so results are bit-identical across runs.
    Scanning a row stops as soon as a candidate scores 1.0: scores never
    exceed 1.0 and a later candidate would have to beat the best strictly,
    so the choice cannot change.  The scan order here must stay in lockstep
    with _greedy_scores, which fills the memo in exactly this order.
    """
    c2s = b.children
    taken = [False] * len(c2s)
    total = 0.0
    chosen: list[int] = []
    for ca in a.children:
        best_s = 0.0
        best_j = -1
        for j, cb in enumerate(c2s):
            if taken[j] or ca.kind is not cb.kind:
                continue
            s = scores[(id(ca), id(cb))]
            if s > best_s:
                best_s = s
                best_j = j
                if s == 1.0:
                    break
        chosen.append(best_j)
        if best_j >= 0:
            total += best_s
            taken[best_j] = True
    return total, chosen


class _RowFrame:
    """Resumable row scan for one node pair; see _greedy_scores."""

    __slots__ = ("a", "b", "i", "j", "best_s", "best_j", "total", "taken")

    def __init__(self, a: CleanNode, b: CleanNode) -> None:
        self.a = a
        self.b = b
        self.i = 0
        self.j = 0
        self.best_s = 0.0
        self.best_j = -1
        self.total = 0.0
        self.taken = [False] * len(b.children)


def _greedy_scores(t1: CleanNode, t2: CleanNode) -> dict[tuple[int, int], float]:
    """Score the root pair, memoizing every node pair the matching visits.

    Pair scores are computed on demand: a row scan that needs a child pair's
    score suspends, the child pair is evaluated, and the scan resumes.  Only
    pairs the greedy matching actually inspects are ever scored, which keeps
    near-identical trees close to linear instead of quadratic.
    """
    scores: dict[tuple[int, int], float] = {}
    stack: list[_RowFrame] = [_RowFrame(t1, t2)]
    while stack:
        frame = stack[-1]
        a, b = frame.a, frame.b
        key = (id(a), id(b))
        if key in scores:
            stack.pop()
            continue
        if a.kind is not b.kind:
            scores[key] = 0.0
            stack.pop()
            continue
        c1s, c2s = a.children, b.children
        missing: tuple[CleanNode, CleanNode] | None = None
        while frame.i < len(c1s):
            ca = c1s[frame.i]
            while frame.j < len(c2s):
                j = frame.j
                cb = c2s[j]
                if frame.taken[j] or ca.kind is not cb.kind:
                    frame.j += 1
                    continue
                s = scores.get((id(ca), id(cb)))
                if s is None:
                    missing = (ca, cb)
                    break
                frame.j += 1
                if s > frame.best_s:
                    frame.best_s = s
                    frame.best_j = j
                    if s == 1.0:
                        break
            if missing is not None:
                break
            if frame.best_j >= 0:
                frame.total += frame.best_s
                frame.taken[frame.best_j] = True
            frame.i += 1
            frame.j = 0
            frame.best_s = 0.0
            frame.best_j = -1
        if missing is not None:
            stack.append(_RowFrame(missing[0], missing[1]))
            continue
        m = max(len(c1s), len(c2s))
        scores[key] = frame.total / m if m > 0 else 1.0
        stack.pop()
    return scores


def sim_ast(
    t1: CleanNode, t2: CleanNode, *, depth_limit: int = DEFAULT_DEPTH_LIMIT
) -> float:
    """Greedy order-insensitive similarity of two cleaned trees, in [0, 1].

    Deterministic: equal inputs give bit-identical results.  Raises
    DepthLimitError when either tree is deeper than `depth_limit`.
    """
    _check_depth(t1, t2, depth_limit)
    scores = _greedy_scores(t1, t2)
    return scores[(id(t1), id(t2))]


def sim_ast_with_trace(
    t1: CleanNode, t2: CleanNode, *, depth_limit: int = DEFAULT_DEPTH_LIMIT
) -> tuple[float, tuple[MatchStep, ...]]:
    """Like sim_ast, also returning the greedy matches chosen at every node.

    Within any one parent the matched right children are pairwise distinct.
    Unmatched children produce no step.
    """
    _check_depth(t1, t2, depth_limit)
    scores = _greedy_scores(t1, t2)
    steps: list[MatchStep] = []
    if t1.kind is t2.kind:
        work: list[tuple[CleanNode, CleanNode, tuple[int, ...], tuple[int, ...]]] = [
            (t1, t2, (), ())
        ]
        while work:
            a, b, path1, path2 = work.pop()
            _, chosen = _greedy_row(a, b, scores)
            matched = []
            for i, j in enumerate(chosen):
                if j < 0:
                    continue
                ca, cb = a.children[i], b.children[j]
                pair_score = scores[(id(ca), id(cb))]
                steps.append(MatchStep(path1 + (i,), path2 + (j,), pair_score))
                matched.append((ca, cb, path1 + (i,), path2 + (j,)))
            work.extend(reversed(matched))  # preorder, leftmost first
    return scores[(id(t1), id(t2))], tuple(steps)


def sim_ast_seq(
    t1: CleanNode, t2: CleanNode, *, depth_limit: int = DEFAULT_DEPTH_LIMIT
) -> float:
    """Positional variant of sim_ast: children pair by index, no matching.

    Shares the kind gate, the max-size normalization, and the leaf rule with
    sim_ast, so it differs only when child order differs.
    """
    _check_depth(t1, t2, depth_limit)
    scores: dict[tuple[int, int], float] = {}
    stack: list[tuple[CleanNode, CleanNode, bool]] = [(t1, t2, False)]
    while stack:
        a, b, ready = stack.pop()
        key = (id(a), id(b))
        if ready:
            total = 0.0
            for ca, cb in zip(a.children, b.children):
                total += scores[(id(ca), id(cb))]
            m = max(len(a.children), len(b.children))
            scores[key] = total / m if m > 0 else 1.0
            continue
        if key in scores:
            continue
        if a.kind is not b.kind:
            scores[key] = 0.0
            continue
        stack.append((a, b, True))
        for ca, cb in zip(a.children, b.children):
            stack.append((ca, cb, False))
    return scores[(id(t1), id(t2))]


@dataclass(frozen=True)
class SourceComparison:
    """Similarity of two sources, or the classification that blocked it."""

    score: float | None
    ref: Validity
    gen: Validity


def compare_sources(
    ref: str,
    gen: str,
    mode: str = "ast",
    *,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> SourceComparison:
    """Classify both sources; when both parse, score their cleaned roots.

    The generated tree is the first similarity argument and the reference the
    second, matching the reward definition.  `mode` selects 'ast' (greedy)
    or 'seq' (positional).
    """
    if mode not in ("ast", "seq"):
        raise ValueError(f"mode must be 'ast' or 'seq', got {mode!r}")
    ref_v = classify(ref)
    gen_v = classify(gen)
    score = None
    if ref_v.is_parsed and gen_v.is_parsed:
        assert ref_v.ast is not None and gen_v.ast is not None
        fn = sim_ast if mode == "ast" else sim_ast_seq
        score = fn(clean(gen_v.ast), clean(ref_v.ast), depth_limit=depth_limit)
    return SourceComparison(score=score, ref=ref_v, gen=gen_v)
