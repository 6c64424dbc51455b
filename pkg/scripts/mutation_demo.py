#!/usr/bin/env python3
"""Show what each mutation does to the similarity metrics.

Applies the three structure-preserving mutations to one Verilog file and
prints the greedy and positional similarity of each mutant against the
original, plus the reward the mutant would earn.  Reordering and constant
rewriting leave the greedy score at 1.0 by construction; the positional
score is where reordering shows up.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from vsr.corpus import MutationError, MutationKind, MutationSpec, mutate
from vsr.parser import classify
from vsr.reward import reward
from vsr.similarity import sim_ast, sim_ast_seq
from vsr.trees import clean

DEFAULT_FILE = Path(__file__).parent.parent / "tests" / "golden" / "fifo_sync.v"


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("file", nargs="?", default=DEFAULT_FILE, type=Path)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--show-source", action="store_true",
                    help="print each mutant's source after the table")
    args = ap.parse_args(argv)

    source = args.file.read_text(encoding="utf-8")
    validity = classify(source)
    if not validity.is_parsed:
        print(f"{args.file}: {validity.status.value}", file=sys.stderr)
        return 1
    base = clean(validity.ast)

    print(f"{args.file.name}  (seed {args.seed})")
    print(f"{'mutation':<12} {'sim_ast':>10} {'sim_ast_seq':>12} {'reward':>10}")
    mutants: list[tuple[str, str]] = []
    for kind in MutationKind:
        try:
            mutant = mutate(source, MutationSpec(kind, args.seed))
        except MutationError as exc:
            print(f"{kind.value:<12} skipped: {exc}")
            continue
        tree = clean(classify(mutant).ast)
        row = reward(mutant, source)
        print(
            f"{kind.value:<12} {sim_ast(tree, base):>10.6f} "
            f"{sim_ast_seq(tree, base):>12.6f} {row.reward:>10.6f}"
        )
        mutants.append((kind.value, mutant))

    if args.show_source:
        for name, text in mutants:
            print(f"\n--- {name} ---")
            print(text, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
