#!/usr/bin/env python3
"""Assemble a JSONL corpus from a directory of Verilog files and curate it.

Every `*.v` file becomes one record.  The spec text comes from a sidecar
`<stem>.txt` when present, otherwise a placeholder naming the file.  The
curated corpus is written as JSONL and the derived statistics are printed,
so the output is ready for `vsr corpus stats` or direct training use.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from vsr.corpus import CorpusRecord, FilterConfig, corpus_stats, curate

DEFAULT_DIR = Path(__file__).parent.parent / "tests" / "golden"


def collect(directory: Path) -> list[CorpusRecord]:
    records = []
    for path in sorted(directory.glob("*.v")):
        sidecar = path.with_suffix(".txt")
        spec = (
            sidecar.read_text(encoding="utf-8").strip()
            if sidecar.exists()
            else f"reference implementation {path.stem}"
        )
        records.append(CorpusRecord(path.stem, spec, path.read_text(encoding="utf-8")))
    return records


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory", nargs="?", default=DEFAULT_DIR, type=Path)
    ap.add_argument("--out", type=Path, default=Path("corpus.jsonl"))
    ap.add_argument("--max-tokens", type=int, default=4096)
    args = ap.parse_args(argv)

    records = collect(args.directory)
    if not records:
        print(f"no .v files under {args.directory}", file=sys.stderr)
        return 1
    kept, dropped = curate(records, FilterConfig(max_tokens=args.max_tokens))

    with open(args.out, "w", encoding="utf-8") as handle:
        for record in kept:
            line = {"id": record.id, "spec": record.spec_text, "code": record.ref_code}
            handle.write(json.dumps(line) + "\n")

    print(f"{len(records)} scanned, {len(kept)} kept -> {args.out}")
    for drop in dropped:
        print(f"  dropped {drop.record.id}: {drop.reason.value}: {drop.detail}")
    if kept:
        print(f"{'measure':<16} {'min':>10} {'mean':>10} {'max':>10}")
        for measure, row in corpus_stats(kept).items():
            print(
                f"{measure:<16} {row['min']:>10.2f} {row['mean']:>10.2f} "
                f"{row['max']:>10.2f}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
