"""Command-line pipeline: gen-synthetic, probe, project, fit, predict,
evaluate. One subcommand per stage; artifacts are JSONL/CSV/JSON files so
stages compose through the filesystem.

Exit codes: 0 success, 2 usage, 3 I/O failure, 4 contract violation.
Output files are written atomically (temp + rename) and depend only on the
inputs and flags, never on wall clock or file paths, so identical
invocations produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import kpca, metrics, probing, store, synthetic, timeline
from .errors import ChronolineError

_YEAR_DEFAULTS = {"ymin": 1700, "ymax": 2024}


def _thread_count() -> int:
    raw = os.environ.get("CHRONOLINE_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ChronolineError(
            f"CHRONOLINE_THREADS must be a positive integer, got {raw!r}"
        )
    return n


def _map_ordered(fn: Callable, items: Sequence) -> list:
    """Map preserving input order, threaded when CHRONOLINE_THREADS > 1."""
    workers = _thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _atomic_write(path: str | Path, write_fn: Callable[[str], None]) -> None:
    """Run write_fn against a temp file, then rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    def write(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            for row in rows:
                fh.write(json.dumps(row, allow_nan=False))
                fh.write("\n")

    _atomic_write(path, write)


def _write_json(path: str | Path, payload: dict) -> None:
    def write(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")

    _atomic_write(path, write)


def _load_anchor_file(path: str, ymin: int | None, ymax: int | None) -> store.TimeAnchorSet:
    """Read an anchor JSONL file; infer the year range unless flags pin it."""
    embeddings = store.load_embeddings(path)
    years = [rec.year for rec in embeddings if rec.year is not None]
    if not years:
        raise ChronolineError(f"{path}: no records carry a year field")
    if ymin is None:
        ymin = min(years)
    if ymax is None:
        ymax = max(years)
    return store.to_anchor_set(embeddings, ymin, ymax)


def _note(args: argparse.Namespace, message: str) -> None:
    if args.verbose:
        print(message, file=sys.stderr)


# ---------------------------------------------------------------- handlers

def _cmd_gen_synthetic(args: argparse.Namespace) -> None:
    spec = synthetic.SyntheticSpec(
        dim=args.dim,
        y_min=args.ymin,
        y_max=args.ymax,
        curve_kind=args.kind,
        noise_sigma=args.sigma,
        queries_per_year=args.per_year,
        seed=args.seed,
    )
    anchors, queries = synthetic.generate(spec)
    _atomic_write(
        args.anchors_out,
        lambda tmp: store.save_embeddings(store.anchors_to_embedding_set(anchors), tmp),
    )
    _atomic_write(args.queries_out, lambda tmp: store.save_embeddings(queries, tmp))
    _note(args, f"gen-synthetic: {len(anchors)} anchors, {len(queries)} queries")


def _cmd_probe(args: argparse.Namespace) -> None:
    anchors = _load_anchor_file(args.anchors, args.ymin, args.ymax)
    queries = store.load_embeddings(args.queries)
    results = _map_ordered(
        lambda rec: probing.probe(rec.vec, anchors, top_k=args.top_k, query_id=rec.id),
        queries.records,
    )
    rows = []
    for res in results:
        row = {"id": res.id, "y_pred": res.y_pred, "score": res.score}
        if args.top_k > 1:
            row["ranked_years"] = [[y, s] for y, s in res.ranked_years]
        rows.append(row)
    _write_jsonl(args.out, rows)
    _note(args, f"probe: {len(rows)} results")


def _cmd_project(args: argparse.Namespace) -> None:
    anchors = _load_anchor_file(args.anchors, args.ymin, args.ymax)
    projector = kpca.fit(anchors, s_dim=args.dims)
    queries = store.load_embeddings(args.queries) if args.queries else None

    header = ["id", "year", "label"] + [f"c{k + 1}" for k in range(projector.s_dim)]
    lines = [",".join(header)]
    anchor_embeddings = store.anchors_to_embedding_set(anchors)
    for rec, coords in zip(anchor_embeddings, kpca.project_all(projector, anchor_embeddings)):
        lines.append(_csv_row(rec, coords))
    if queries is not None:
        for rec, coords in zip(queries, kpca.project_all(projector, queries)):
            lines.append(_csv_row(rec, coords))

    def write(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines))
            fh.write("\n")

    _atomic_write(args.out, write)
    _note(args, f"project: {len(lines) - 1} rows, {projector.s_dim} components")


def _csv_row(rec: store.EmbeddingRecord, coords) -> str:
    year = "" if rec.year is None else str(rec.year)
    label = "" if rec.label is None else rec.label
    return ",".join([rec.id, year, label] + [repr(float(c)) for c in coords])


def _cmd_fit(args: argparse.Namespace) -> None:
    anchors = _load_anchor_file(args.anchors, args.ymin, args.ymax)
    projector = None
    if args.space == timeline.SPACE_KPCA:
        projector = kpca.fit(anchors, s_dim=args.dims)
    model = timeline.fit_timeline(
        anchors,
        space=args.space,
        projector=projector,
        k=args.control_points,
        n_samples=args.samples,
    )
    _atomic_write(args.model_out, lambda tmp: timeline.save_model(model, tmp))
    _note(
        args,
        f"fit: space={model.space} degree={model.curve.degree} "
        f"samples={model.curve.n_samples}",
    )


def _cmd_predict(args: argparse.Namespace) -> None:
    model = timeline.load_model(args.model)
    queries = store.load_embeddings(args.queries)
    if args.inference == "nn":
        fn = timeline.predict_nn
    else:
        fn = timeline.predict_interp
    preds = _map_ordered(
        lambda rec: fn(model, rec.vec, query_id=rec.id), queries.records
    )
    rows = [
        {"id": p.id, "y_pred": p.y_pred, "t_query": p.t_query, "method": p.method}
        for p in preds
    ]
    _write_jsonl(args.out, rows)
    _note(args, f"predict: {len(rows)} predictions via {args.inference}")


def _load_predictions(path: str) -> list:
    class _Pred:
        __slots__ = ("id", "y_pred")

        def __init__(self, id: str, y_pred: float):
            self.id = id
            self.y_pred = y_pred

    preds = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                preds.append(_Pred(str(obj["id"]), float(obj["y_pred"])))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ChronolineError(f"{path}:{lineno}: bad prediction line: {exc}") from exc
    if not preds:
        raise ChronolineError(f"{path}: no predictions")
    return preds


def _cmd_evaluate(args: argparse.Namespace) -> None:
    preds = _load_predictions(args.pred)
    truths = store.load_embeddings(args.truth)
    t_lo, i_lo, t_hi, i_hi = args.tai
    cfg = metrics.TaiConfig(
        t_at_ymin=t_lo,
        i_at_ymin=i_lo,
        t_at_ymax=t_hi,
        i_at_ymax=i_hi,
        y_min=args.ymin,
        y_max=args.ymax,
    )
    anchor_coords = None
    ranking_source = None
    if args.model:
        anchor_coords = timeline.load_model(args.model).anchor_params
        ranking_source = "model"
    elif args.projection_1d:
        proj = store.load_projection_1d(args.projection_1d)
        anchor_coords = proj.values
        ranking_source = "projection-1d"
    report = metrics.evaluate(preds, truths, cfg=cfg, anchor_coords=anchor_coords)
    payload = report.to_dict()
    payload["params"] = {
        "subcommand": "evaluate",
        "tai": list(args.tai),
        "ymin": args.ymin,
        "ymax": args.ymax,
        "ranking_source": ranking_source,
    }
    _write_json(args.out, payload)
    _note(args, f"evaluate: n={report.n} mae={report.mae:.4f} tai={report.tai:.4f}")


# ------------------------------------------------------------------ parser

def _tai_spec(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "expected four comma-separated numbers: T_ymin,I_ymin,T_ymax,I_ymax"
        )
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return values


def _add_year_flags(sub: argparse.ArgumentParser, required_defaults: bool) -> None:
    if required_defaults:
        sub.add_argument("--ymin", type=int, default=_YEAR_DEFAULTS["ymin"],
                         help="first anchor year (default %(default)s)")
        sub.add_argument("--ymax", type=int, default=_YEAR_DEFAULTS["ymax"],
                         help="last anchor year (default %(default)s)")
    else:
        sub.add_argument("--ymin", type=int, default=None,
                         help="first anchor year (default: inferred from the anchor file)")
        sub.add_argument("--ymax", type=int, default=None,
                         help="last anchor year (default: inferred from the anchor file)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronoline",
        description="Chronological timelines in embedding spaces: generate, "
                    "probe, project, fit, predict, evaluate.",
    )
    parser.add_argument("--verbose", action="store_true", help="progress notes on stderr")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def sub(name, help_text):
        return subs.add_parser(
            name, help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )

    gen = sub("gen-synthetic", "generate a synthetic anchor/query pair")
    gen.add_argument("--kind", choices=synthetic.CURVE_KINDS, default="helix",
                     help="base curve shape")
    gen.add_argument("--dim", type=int, default=512, help="embedding dimension")
    _add_year_flags(gen, required_defaults=True)
    gen.add_argument("--sigma", type=float, default=0.0, help="query noise std dev")
    gen.add_argument("--per-year", type=int, default=1, dest="per_year",
                     help="queries per year")
    gen.add_argument("--seed", type=int, default=0, help="rng seed")
    gen.add_argument("--anchors-out", required=True, dest="anchors_out",
                     help="anchor JSONL output path")
    gen.add_argument("--queries-out", required=True, dest="queries_out",
                     help="query JSONL output path")
    gen.set_defaults(func=_cmd_gen_synthetic)

    probe = sub("probe", "predict years by max dot product with anchors")
    probe.add_argument("--anchors", required=True, help="anchor JSONL file")
    probe.add_argument("--queries", required=True, help="query JSONL file")
    _add_year_flags(probe, required_defaults=False)
    probe.add_argument("--top-k", type=int, default=1, dest="top_k",
                       help="ranked years to keep per query")
    probe.add_argument("--out", required=True, help="result JSONL output path")
    probe.set_defaults(func=_cmd_probe)

    project = sub("project", "project anchors/queries to the KPCA subspace")
    project.add_argument("--anchors", required=True, help="anchor JSONL file")
    project.add_argument("--queries", default=None, help="optional query JSONL file")
    _add_year_flags(project, required_defaults=False)
    project.add_argument("--dims", type=int, default=13, help="subspace dimension S")
    project.add_argument("--out", required=True, help="CSV output path")
    project.set_defaults(func=_cmd_project)

    fit = sub("fit", "fit the Bezier timeline model")
    fit.add_argument("--anchors", required=True, help="anchor JSONL file")
    _add_year_flags(fit, required_defaults=False)
    fit.add_argument("--space", choices=(timeline.SPACE_AMBIENT, timeline.SPACE_KPCA),
                     default=timeline.SPACE_KPCA, help="fitting space")
    fit.add_argument("--dims", type=int, default=13, help="KPCA subspace dimension S")
    fit.add_argument("--control-points", type=int, default=200, dest="control_points",
                     help="Bezier control points K")
    fit.add_argument("--samples", type=int, default=1000,
                     help="curve discretization resolution")
    fit.add_argument("--model-out", required=True, dest="model_out",
                     help="model JSON output path")
    fit.set_defaults(func=_cmd_fit)

    predict = sub("predict", "predict years with a fitted timeline model")
    predict.add_argument("--model", required=True, help="model JSON file")
    predict.add_argument("--queries", required=True, help="query JSONL file")
    predict.add_argument("--inference", choices=("nn", "interp"), default="interp",
                         help="year assignment rule")
    predict.add_argument("--out", required=True, help="prediction JSONL output path")
    predict.set_defaults(func=_cmd_predict)

    ev = sub("evaluate", "score predictions against ground truth")
    ev.add_argument("--pred", required=True, help="prediction JSONL file")
    ev.add_argument("--truth", required=True, help="ground-truth JSONL file")
    ev.add_argument("--tai", type=_tai_spec, default=(20.0, 50.0, 5.0, 15.0),
                    metavar="T0,I0,T1,I1",
                    help="tolerance/intolerance years at ymin and ymax")
    _add_year_flags(ev, required_defaults=True)
    ev.add_argument("--model", default=None,
                    help="timeline model whose anchor ordering gets ranking metrics")
    ev.add_argument("--projection-1d", default=None, dest="projection_1d",
                    help="external year,value CSV to rank instead of a model")
    ev.add_argument("--out", required=True, help="report JSON output path")
    ev.set_defaults(func=_cmd_evaluate)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        args.func(args)
    except ChronolineError as exc:
        print(f"chronoline: error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"chronoline: i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
