#!/usr/bin/env python3
"""Convert a directory of plain-text clusters into sgsum's JSONL input.

Expected layout (one sub-directory per cluster):

    root/
      cluster_001/
        doc_a.txt
        doc_b.txt
        summary.txt      optional reference summary
      cluster_002/
        ...

Each output line is
    {"cluster_id": "cluster_001",
     "documents": [{"doc_id": "doc_a", "text": "..."}, ...],
     "summary": "..."}
and "summary" is omitted when summary.txt is absent.
"""

import argparse
import json
import pathlib
import sys


def convert(root: pathlib.Path, summary_name: str):
    for cluster_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        docs = []
        summary = None
        for path in sorted(cluster_dir.glob("*.txt")):
            text = path.read_text(encoding="utf-8").strip()
            if path.name == summary_name:
                summary = text
            elif text:
                docs.append({"doc_id": path.stem, "text": text})
        if not docs:
            print(f"warning: {cluster_dir} has no documents, skipped", file=sys.stderr)
            continue
        record = {"cluster_id": cluster_dir.name, "documents": docs}
        if summary:
            record["summary"] = summary
        yield record


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("root", type=pathlib.Path)
    parser.add_argument("out", type=pathlib.Path)
    parser.add_argument("--summary-name", default="summary.txt")
    args = parser.parse_args()
    tmp = args.out.with_suffix(args.out.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as f:
        for record in convert(args.root, args.summary_name):
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    tmp.replace(args.out)


if __name__ == "__main__":
    main()
