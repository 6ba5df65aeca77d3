#!/usr/bin/env python3
"""Drive the full CLI pipeline on synthetic data and print the report.

Runs gen-synthetic -> fit -> predict -> evaluate through the same entry
point the installed `chronoline` command uses, so the artifacts left in
--outdir are exactly what the CLI documents: anchor/query JSONL, a model
JSON, prediction JSONL, and an evaluation report.
"""

import argparse
import json
import sys
from pathlib import Path

from chronoline.cli import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("pipeline_out"))
    ap.add_argument("--kind", default="helix", choices=["line", "helix", "s-curve"])
    ap.add_argument("--dim", type=int, default=512)
    ap.add_argument("--sigma", type=float, default=0.0)
    ap.add_argument("--per-year", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--ymin", type=int, default=1700)
    ap.add_argument("--ymax", type=int, default=2024)
    ap.add_argument("--space", default="kpca", choices=["ambient", "kpca"])
    ap.add_argument("--dims", type=int, default=13, help="kpca components")
    ap.add_argument("--control-points", type=int, default=200)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--method", default="interp", choices=["nn", "interp"])
    args = ap.parse_args()

    out = args.outdir
    out.mkdir(parents=True, exist_ok=True)
    anchors = out / "anchors.jsonl"
    queries = out / "queries.jsonl"
    model = out / "model.json"
    preds = out / "predictions.jsonl"
    report = out / "report.json"

    years = [str(args.ymin), str(args.ymax)]
    stages = [
        ["gen-synthetic", "--kind", args.kind, "--dim", str(args.dim),
         "--sigma", str(args.sigma), "--per-year", str(args.per_year),
         "--seed", str(args.seed), "--ymin", years[0], "--ymax", years[1],
         "--anchors-out", str(anchors), "--queries-out", str(queries)],
        ["fit", "--anchors", str(anchors), "--space", args.space,
         "--dims", str(args.dims), "--control-points", str(args.control_points),
         "--samples", str(args.samples), "--model-out", str(model)],
        ["predict", "--model", str(model), "--queries", str(queries),
         "--inference", args.method, "--out", str(preds)],
        ["evaluate", "--pred", str(preds), "--truth", str(queries),
         "--model", str(model), "--ymin", years[0], "--ymax", years[1],
         "--out", str(report)],
    ]
    for argv in stages:
        code = run(argv)
        if code != 0:
            print(f"stage {argv[0]} failed with exit code {code}", file=sys.stderr)
            return code

    print(json.dumps(json.loads(report.read_text()), indent=2, sort_keys=True))
    print(f"\nartifacts in {out}/", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
