"""Command-line front end: run the pipeline stage by stage or end to end.

Subcommands mirror the module boundaries (ingest, corpus, similarity,
cluster, evaluate, sweep), plus `run` for the whole chain, `serve` for the
annotation service, and `compare` for diffing two similarity matrices.

`run` accepts a JSON config file whose keys match the flag names; explicit
flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any
from urllib.parse import urlparse

import numpy as np

from . import __version__
from .clustering import load_cluster_set, predict_clusters, save_cluster_set
from .corpus import (
    CORPUS_KINDS,
    CorpusDocument,
    CorpusSpec,
    build_corpus,
    load_corpus,
    save_corpus,
)
from .errors import SecdedupError, SpecMismatch
from .evaluation import (
    DEFAULT_THRESHOLDS,
    evaluate,
    export_plot_data,
    parse_threshold_grid,
    summary_payload,
    sweep,
)
from .ingest import (
    assemble_dataset,
    load_dataset,
    load_default_catalog,
    load_schema_catalog,
    parse_report,
    save_dataset,
)
from .similarity.embedding import (
    embedding_similarity,
    fetch_embeddings,
    load_embeddings,
)
from .similarity.lexgraph import graph_similarity, load_lexical_graph
from .similarity.lsi import default_rank, lsi_similarity
from .similarity.matrix import SimilarityMatrix, load_matrix, save_matrix, validate_matrix
from .similarity.preprocess import document_frequencies, idf_weights, tokenize_corpus
from .util import atomic_write_json

ENGINES = ("lsi", "graph", "embedding")


def _is_url(source: str) -> bool:
    return urlparse(source).scheme in ("http", "https")


def build_matrix(
    kind: str,
    documents: list[CorpusDocument],
    engine: str,
    k: int | None = None,
    graph_path: str | None = None,
    embeddings_source: str | None = None,
) -> SimilarityMatrix:
    """Produce the similarity matrix for one corpus with the chosen engine."""
    if engine == "lsi":
        tokenized = tokenize_corpus(documents)
        if k is None:
            k = default_rank(len(tokenized), len(document_frequencies(tokenized)))
        return lsi_similarity(tokenized, k, corpus_kind=kind)
    if engine == "graph":
        if not graph_path:
            raise SpecMismatch("engine 'graph' needs --graph pointing at lexical-graph data")
        graph = load_lexical_graph(graph_path)
        tokenized = tokenize_corpus(documents)
        return graph_similarity(tokenized, graph, idf_weights(tokenized), corpus_kind=kind)
    if engine == "embedding":
        if not embeddings_source:
            raise SpecMismatch("engine 'embedding' needs --embeddings FILE or URL")
        doc_ids = [doc.doc_id for doc in documents]
        if _is_url(embeddings_source):
            embeddings = fetch_embeddings(
                embeddings_source, [doc.text for doc in documents], doc_ids=doc_ids
            )
        else:
            embeddings = load_embeddings(embeddings_source)
        return embedding_similarity(doc_ids, embeddings, corpus_kind=kind)
    raise SpecMismatch(f"unknown engine {engine!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace) -> int:
    catalog = (
        load_schema_catalog(args.catalog) if args.catalog else load_default_catalog()
    )
    reports_dir = Path(args.reports)
    if not reports_dir.is_dir():
        raise SecdedupError(f"reports directory {reports_dir} does not exist")

    parsed = []
    next_id = 1
    for mapping in catalog:
        if mapping.testing_type != args.type:
            continue
        report_path = reports_dir / f"{mapping.tool_name}.json"
        if not report_path.exists():
            continue
        findings = parse_report(report_path, mapping, next_id)
        next_id += len(findings)
        parsed.append((mapping.tool_name, findings))
        print(f"  {mapping.tool_name}: {len(findings)} findings")
    if not parsed:
        raise SecdedupError(
            f"no <tool>.json reports for {args.type} tools found in {reports_dir}"
        )
    dataset = assemble_dataset(parsed, args.type)
    save_dataset(dataset, args.out)
    print(f"wrote {args.out} ({len(dataset.findings)} findings)")
    return 0


def cmd_corpus(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.dataset)
    documents = build_corpus(dataset, CorpusSpec(kind=args.kind))
    save_corpus(args.kind, documents, args.out)
    print(f"wrote {args.out} ({len(documents)} documents, kind {args.kind})")
    return 0


def cmd_similarity(args: argparse.Namespace) -> int:
    kind, documents = load_corpus(args.corpus)
    matrix = build_matrix(
        kind,
        documents,
        args.engine,
        k=args.k,
        graph_path=args.graph,
        embeddings_source=args.embeddings,
    )
    validate_matrix(matrix)
    save_matrix(matrix, args.out)
    print(f"wrote {args.out} ({matrix.engine_tag} on {kind}, n={matrix.n})")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    matrix = load_matrix(args.matrix)
    _, documents = load_corpus(args.corpus)
    clusters = predict_clusters(matrix, documents, args.threshold)
    save_cluster_set(clusters, args.out)
    print(f"wrote {args.out} ({len(clusters.clusters)} clusters at {args.threshold})")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    predicted = load_cluster_set(args.predicted)
    truth = load_cluster_set(args.truth)
    result = evaluate(predicted, truth)
    payload = result.to_dict()
    if args.out:
        atomic_write_json(payload, args.out)
    print(json.dumps(payload, indent=2))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    matrix = load_matrix(args.matrix)
    _, documents = load_corpus(args.corpus)
    truth = load_cluster_set(args.truth)
    thresholds = (
        parse_threshold_grid(args.thresholds) if args.thresholds else DEFAULT_THRESHOLDS
    )
    result = sweep(matrix, documents, truth, thresholds)
    export_plot_data([result], args.out)
    if args.summary:
        atomic_write_json(summary_payload([result]), args.summary)
    best = result.best_row
    print(
        f"wrote {args.out}; best threshold {best.threshold:.2f} "
        f"P={best.precision:.3f} R={best.recall:.3f} F={best.f_score:.3f}"
    )
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config: dict[str, Any] = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SecdedupError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise SecdedupError("config root must be a JSON object")

    def setting(name: str) -> Any:
        value = getattr(args, name, None)
        return value if value is not None else config.get(name)

    missing = [name for name in ("dataset", "corpus", "engine", "truth", "out") if not setting(name)]
    if missing:
        raise SecdedupError(f"run needs {', '.join('--' + m for m in missing)} (flag or config)")
    kind = setting("corpus")
    if kind not in CORPUS_KINDS:
        raise SecdedupError(f"--corpus must be a corpus kind, one of {', '.join(CORPUS_KINDS)}")
    engine = setting("engine")
    if engine not in ENGINES:
        raise SecdedupError(f"--engine must be one of {', '.join(ENGINES)}")

    out_dir = Path(setting("out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset = load_dataset(setting("dataset"))
    documents = build_corpus(dataset, CorpusSpec(kind=kind))
    save_corpus(kind, documents, out_dir / "corpus.json")
    print(f"corpus: {len(documents)} documents ({kind})")

    matrix = build_matrix(
        kind,
        documents,
        engine,
        k=setting("k"),
        graph_path=setting("graph"),
        embeddings_source=setting("embeddings"),
    )
    validate_matrix(matrix)
    save_matrix(matrix, out_dir / "matrix.npz")
    print(f"similarity: {matrix.engine_tag}, n={matrix.n}")

    truth = load_cluster_set(setting("truth"))
    grid_spec = setting("thresholds")
    thresholds = parse_threshold_grid(grid_spec) if grid_spec else DEFAULT_THRESHOLDS
    result = sweep(matrix, documents, truth, thresholds)

    export_plot_data([result], out_dir / "sweep.csv")
    atomic_write_json(summary_payload([result]), out_dir / "summary.json")
    best = result.best_row
    predicted = predict_clusters(matrix, documents, best.threshold)
    save_cluster_set(predicted, out_dir / "clusters_best.json")

    print(
        f"best threshold {best.threshold:.2f}: "
        f"P={best.precision:.3f} R={best.recall:.3f} F={best.f_score:.3f} "
        f"(tp={best.tp} fp={best.fp} fn={best.fn})"
    )
    print(f"outputs in {out_dir}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    addr = args.serve_addr or os.environ.get("SECDEDUP_ADDR", "127.0.0.1:8000")
    host, _, port_text = addr.partition(":")
    try:
        port = int(port_text) if port_text else 8000
    except ValueError as exc:
        raise SecdedupError(f"bad --serve-addr {addr!r}") from exc
    data_dir = args.data_dir or os.environ.get("SECDEDUP_DATA_DIR", "annotation-data")

    app = create_app(data_dir, catalog_path=args.catalog)
    print(f"serving on {host}:{port}, data in {data_dir}")
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    matrix_a = load_matrix(args.a)
    matrix_b = load_matrix(args.b)
    if matrix_a.n != matrix_b.n:
        raise SecdedupError(f"matrix sizes differ: {matrix_a.n} vs {matrix_b.n}")
    diff = np.abs(matrix_a.scores - matrix_b.scores)
    exceeding = np.argwhere(diff > args.tolerance)
    worst = sorted(
        ((float(diff[i, j]), int(i), int(j)) for i, j in exceeding), reverse=True
    )[:10]
    report = {
        "n": matrix_a.n,
        "max_abs_diff": float(diff.max()) if matrix_a.n else 0.0,
        "tolerance": args.tolerance,
        "entries_exceeding": len(exceeding),
        "worst_pairs": [{"i": i, "j": j, "diff": d} for d, i, j in worst],
    }
    print(json.dumps(report, indent=2))
    return 0 if len(exceeding) == 0 else 1


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secdedup",
        description="Deduplicate security-scanner findings via text similarity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse tool reports into one dataset file")
    p.add_argument("--reports", required=True, help="directory holding <tool>.json reports")
    p.add_argument("--catalog", help="schema catalog JSON (default: packaged catalog)")
    p.add_argument("--type", required=True, choices=("SAST", "DAST"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("corpus", help="build a finding-string corpus from a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--kind", required=True, choices=CORPUS_KINDS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("similarity", help="compute a pairwise similarity matrix")
    p.add_argument("--corpus", required=True, help="corpus JSON file")
    p.add_argument("--engine", required=True, choices=ENGINES)
    p.add_argument("--k", type=int, help="LSI rank (default: min(300, n-1, vocab))")
    p.add_argument("--graph", help="lexical graph data (TSV file or database dir)")
    p.add_argument("--embeddings", help="embedding JSONL file or service URL")
    p.add_argument("--out", required=True, help=".npz or .json matrix dump")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("cluster", help="threshold + transitive closure into clusters")
    p.add_argument("--matrix", required=True)
    p.add_argument("--corpus", required=True, help="corpus JSON file")
    p.add_argument("--threshold", required=True, type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="score predicted clusters against ground truth")
    p.add_argument("--predicted", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="evaluate across a threshold grid, export plot CSV")
    p.add_argument("--matrix", required=True)
    p.add_argument("--corpus", required=True, help="corpus JSON file")
    p.add_argument("--truth", required=True)
    p.add_argument("--thresholds", help="grid as lo:hi:step (default 0.10:0.95:0.05)")
    p.add_argument("--out", required=True, help="plot CSV path")
    p.add_argument("--summary", help="optional summary JSON path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("run", help="full chain: corpus, similarity, sweep, best clusters")
    p.add_argument("--config", help="JSON config; flags override its values")
    p.add_argument("--dataset")
    p.add_argument("--corpus", help="corpus kind, e.g. SAST_ConcD")
    p.add_argument("--engine", choices=ENGINES)
    p.add_argument("--k", type=int)
    p.add_argument("--graph")
    p.add_argument("--embeddings")
    p.add_argument("--thresholds")
    p.add_argument("--truth")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--serve-addr", help="host:port (default env SECDEDUP_ADDR or 127.0.0.1:8000)")
    p.add_argument("--data-dir", help="persistence dir (default env SECDEDUP_DATA_DIR)")
    p.add_argument("--catalog", help="schema catalog JSON for report uploads")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("compare", help="diff two similarity matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SecdedupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
