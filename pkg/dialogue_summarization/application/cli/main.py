from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import replace
from itertools import islice
from pathlib import Path
from typing import IO, Any, Iterable, Iterator, Sequence

from loguru import logger

from dialogue_summarization.application.errors import ConfigError, DialsumError, TranscriptError
from dialogue_summarization.application.log_setup import setup_logging
from dialogue_summarization.application.schemas import Transcript
from dialogue_summarization.application.settings import PipelineConfig, dump_config, load_config
from dialogue_summarization.application.services import lexicon_builder, rouge
from dialogue_summarization.application.services.dataset_stats import dataset_stats
from dialogue_summarization.application.services.pos_tagger import get_tagger
from dialogue_summarization.application.services.summarizer import DialogueSummarizer, SummaryBundle
from dialogue_summarization.application.services.transcript_loader import iter_documents, load_references

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2
CONFIG_ECHO = "effective_config.env"

# CLI flag dest -> PipelineConfig field
_CONFIG_FLAGS = {
    "debug": "debug",
    "edge_weight": "edge_weight_mode",
    "stopwords": "stopwords_path",
    "lexicon": "lexicon_path",
    "segmentation": "segmentation",
    "segment_threshold_chars": "segment_threshold_chars",
    "topics": "topics_p",
    "segment_mode": "segment_mode",
    "segment_cutoff": "segment_similarity_cutoff",
    "threshold_scope": "threshold_scope",
    "k_paths": "k_paths",
    "search_depth": "search_depth",
    "min_tokens": "min_tokens",
    "require_verb": "require_verb",
    "pov_enabled": "pov_enabled",
    "pov_keep_possessives": "pov_keep_possessives",
    "pov_rules": "pov_rules_path",
    "baseline": "baseline",
    "baseline_pov": "baseline_pov",
    "rouge_stemming": "rouge_stemming",
    "rouge_remove_stopwords": "rouge_remove_stopwords",
    "rouge_l_mode": "rouge_l_mode",
    "jobs": "jobs",
}


# ---------------- argument parsing ----------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (overrides --config and DIALSUM_* variables)")
    g.add_argument("--config", type=Path, help="KEY=value config file")
    g.add_argument("--debug", action="store_true", default=None)
    g.add_argument("--edge-weight", choices=["paper", "filippova"])
    g.add_argument("--stopwords", type=Path, help="stopword list, one word per line")
    g.add_argument("--lexicon", type=Path, help="extra word<TAB>TAG lexicon (see build-lexicon)")
    g.add_argument("--segmentation", choices=["auto", "always", "off"])
    g.add_argument("--segment-threshold-chars", type=int)
    g.add_argument("--topics", type=int, help="number of topic segments p")
    g.add_argument("--segment-mode", choices=["top", "threshold"])
    g.add_argument("--segment-cutoff", type=float, help="threshold mode: similarity cutoff")
    g.add_argument("--threshold-scope", choices=["segment", "speaker"])
    g.add_argument("--k-paths", type=int)
    g.add_argument("--search-depth", type=int)
    g.add_argument("--min-tokens", type=int)
    g.add_argument("--no-require-verb", dest="require_verb", action="store_false", default=None)
    g.add_argument("--no-pov", dest="pov_enabled", action="store_false", default=None)
    g.add_argument("--pov-keep-possessives", action="store_true", default=None)
    g.add_argument("--pov-rules", type=Path, help="JSON POV rule set")
    g.add_argument("--baseline", choices=["graph", "lead3"])
    g.add_argument("--baseline-pov", action="store_true", default=None, help="rewrite baseline output to reported speech")
    g.add_argument("--rouge-stemming", action="store_true", default=None)
    g.add_argument("--rouge-remove-stopwords", action="store_true", default=None)
    g.add_argument("--rouge-l-mode", choices=["summary", "union"])
    g.add_argument("--jobs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dialsum", description="Graph-based unsupervised dialogue summarization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="summarize every document of an input file")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, help="output JSONL (stdout when omitted)")
    p.add_argument("--out-dir", type=Path, help="where the effective config and dumps go")
    p.add_argument("--dump-keywords", action="store_true")
    p.add_argument("--dump-scores", action="store_true")
    p.add_argument("--dump-segments", action="store_true")
    _add_config_flags(p)

    p = sub.add_parser("evaluate", help="ROUGE of system summaries against references")
    p.add_argument("system", type=Path)
    p.add_argument("reference", type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("report"))
    _add_config_flags(p)

    p = sub.add_parser("pov", help="rewrite existing system summaries to reported speech")
    p.add_argument("system", type=Path, help="{\"id\", \"summary\"} JSONL; sentences carry \"Speaker:\" prefixes")
    p.add_argument("-o", "--output", type=Path)
    _add_config_flags(p)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("input", type=Path)

    p = sub.add_parser("graph-dump", help="write one document's word graph as DOT or JSON")
    p.add_argument("input", type=Path)
    p.add_argument("--doc-id", help="document to dump (first one by default)")
    p.add_argument("--speaker", help="restrict to one speaker's subgraph")
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("-o", "--output", type=Path)
    _add_config_flags(p)

    p = sub.add_parser("build-lexicon", help="word<TAB>TAG lexicon from the nltk Brown corpus")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--size", type=int, default=20_000)
    p.add_argument("--min-count", type=int, default=2)

    p = sub.add_parser("plot-data", help="CSV series for plotting")
    kind = p.add_subparsers(dest="kind", required=True)
    k = kind.add_parser("segments", help="per-gap topic distances and chosen boundaries")
    k.add_argument("input", type=Path)
    k.add_argument("--doc-id")
    k.add_argument("-o", "--output", type=Path)
    _add_config_flags(k)
    k = kind.add_parser("rouge", help="per-metric sigma/mean across corpus reports")
    k.add_argument("reports", nargs="+", help="NAME=report.json or report.json")
    k.add_argument("-o", "--output", type=Path)

    return parser


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {
        field: getattr(args, dest)
        for dest, field in _CONFIG_FLAGS.items()
        if getattr(args, dest, None) is not None
    }
    return load_config(getattr(args, "config", None), overrides)


# ---------------- helpers ----------------

@contextmanager
def _open_output(path: Path | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        yield fh


def _write_jsonl(fh: IO[str], record: dict[str, Any]) -> None:
    fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _select_document(path: Path, doc_id: str | None) -> Transcript:
    for tr in iter_documents(path):
        if doc_id is None or tr.doc_id == doc_id:
            return tr
    raise TranscriptError(f"document '{doc_id}' not found in {path}")


# ---------------- summarize ----------------

_WORKER: DialogueSummarizer | None = None


def _init_worker(config: PipelineConfig) -> None:
    global _WORKER
    setup_logging(config.debug)
    _WORKER = DialogueSummarizer.build(config)


def _summarize_one(tr: Transcript) -> tuple[str, SummaryBundle | None, str | None]:
    assert _WORKER is not None
    try:
        return tr.doc_id, _WORKER.run(tr), None
    except DialsumError as e:
        return tr.doc_id, None, str(e)


def _windows(items: Iterable[Transcript], size: int) -> Iterator[list[Transcript]]:
    it = iter(items)
    while batch := list(islice(it, size)):
        yield batch


def iter_summaries(
    documents: Iterable[Transcript], config: PipelineConfig
) -> Iterator[tuple[str, SummaryBundle | None, str | None]]:
    """(doc_id, bundle, error) per document, in input order."""
    if config.jobs == 1:
        _init_worker(config)
        for tr in documents:
            yield _summarize_one(tr)
        return

    DialogueSummarizer.build(config)  # fail fast on config problems before forking
    with ProcessPoolExecutor(max_workers=config.jobs, initializer=_init_worker, initargs=(config,)) as pool:
        # bounded windows keep memory flat in the document count
        for window in _windows(documents, config.jobs * 4):
            yield from pool.map(_summarize_one, window)


def _keywords_record(bundle: SummaryBundle) -> dict[str, Any]:
    return {
        "id": bundle.doc_id,
        "segments": [{"segment": r.index, "keywords": r.keywords} for r in bundle.segments],
    }


def _scores_record(bundle: SummaryBundle) -> dict[str, Any]:
    return {
        "id": bundle.doc_id,
        "segments": [
            {
                "segment": r.index,
                "threshold": r.threshold,
                "speaker_thresholds": r.speaker_thresholds,
                "sentence_scores": {str(k): v for k, v in r.per_sentence_scores.items()},
                "paths": [
                    {
                        "speaker": p.speaker,
                        "text": p.text,
                        "score": p.score.score,
                        "weight": p.total_weight,
                        "fallback": p.fallback,
                    }
                    for p in r.paths
                ],
            }
            for r in bundle.segments
        ],
    }


def _segments_record(bundle: SummaryBundle) -> dict[str, Any]:
    seg = bundle.segmentation
    return {
        "id": bundle.doc_id,
        "p": len(bundle.segments),
        "boundaries": seg.boundaries if seg else [],
        "distances": seg.distances if seg else [],
        "sizes": [len(r.sentence_ids) for r in bundle.segments],
    }


def cmd_summarize(args: argparse.Namespace, config: PipelineConfig) -> int:
    out_dir = args.out_dir or (args.output.parent if args.output else Path("."))
    dump_config(config, out_dir / CONFIG_ECHO)

    dumps = {
        name: (out_dir / f"{name}.jsonl").open("w", encoding="utf-8")
        for name, wanted in (("keywords", args.dump_keywords), ("scores", args.dump_scores), ("segments", args.dump_segments))
        if wanted
    }
    writers = {"keywords": _keywords_record, "scores": _scores_record, "segments": _segments_record}

    failed: list[str] = []
    done = 0
    try:
        with _open_output(args.output) as fh:
            for doc_id, bundle, error in iter_summaries(iter_documents(args.input), config):
                if bundle is None:
                    logger.error("Document '{}' failed: {}", doc_id, error)
                    failed.append(doc_id)
                    continue
                _write_jsonl(fh, bundle.to_record())
                for name, dump in dumps.items():
                    _write_jsonl(dump, writers[name](bundle))
                done += 1
    finally:
        for dump in dumps.values():
            dump.close()

    logger.info("Summarized {} document(s); {} failed", done, len(failed))
    return EXIT_INPUT if failed else EXIT_OK


# ---------------- evaluate ----------------

def _load_system(path: Path) -> dict[str, str]:
    return {doc_id: " ".join(summaries) for doc_id, summaries in load_references(path).items()}


def cmd_evaluate(args: argparse.Namespace, config: PipelineConfig) -> int:
    system = _load_system(args.system)
    refs = load_references(args.reference)

    missing_sys = sorted(set(refs) - set(system))
    missing_ref = sorted(set(system) - set(refs))
    if missing_sys or missing_ref:
        if missing_sys:
            logger.error("Missing from system output: {}", ", ".join(missing_sys))
        if missing_ref:
            logger.error("Missing from references: {}", ", ".join(missing_ref))
        return EXIT_INPUT

    ids = list(refs)
    report = rouge.evaluate_corpus(
        [(system[i], refs[i]) for i in ids], ids=ids, options=rouge.RougeOptions.from_config(config)
    )
    rouge.write_csv(report, args.out_dir / "rouge.csv")
    rouge.write_json(report, args.out_dir / "rouge.json")
    dump_config(config, args.out_dir / CONFIG_ECHO)
    print(json.dumps(report.to_dict()["mean"], sort_keys=True))
    return EXIT_OK


# ---------------- pov / build-lexicon ----------------

def cmd_pov(args: argparse.Namespace, config: PipelineConfig) -> int:
    summarizer = DialogueSummarizer.build(config)
    system = load_references(args.system)
    with _open_output(args.output) as fh:
        for doc_id, summaries in system.items():
            sentences = [s for text in summaries for s in summarizer.rewrite_summary(text)]
            _write_jsonl(fh, {"id": doc_id, "summary": " ".join(sentences), "sentences": sentences})
    logger.info("Rewrote {} system summaries", len(system))
    return EXIT_OK


def cmd_build_lexicon(args: argparse.Namespace) -> int:
    if args.size < 1 or args.min_count < 1:
        raise ConfigError("--size and --min-count must be positive")
    entries = lexicon_builder.build_lexicon(
        lexicon_builder.brown_tagged_words(),
        size=args.size,
        min_count=args.min_count,
        skip=get_tagger().closed_class,
    )
    lexicon_builder.write_lexicon(entries, args.output)
    logger.info("Wrote {} lexicon entries to {}", len(entries), args.output)
    return EXIT_OK


# ---------------- stats / graph-dump / plot-data ----------------

def cmd_stats(args: argparse.Namespace) -> int:
    stats = dataset_stats(iter_documents(args.input))
    print(stats.model_dump_json(indent=2))
    return EXIT_OK


def cmd_graph_dump(args: argparse.Namespace, config: PipelineConfig) -> int:
    summarizer = DialogueSummarizer.build(config)
    tr = _select_document(args.input, args.doc_id)
    g = summarizer.build_graph(summarizer.prepare(tr))
    if args.speaker:
        g = g.speaker_subgraph(args.speaker)
    with _open_output(args.output) as fh:
        fh.write(g.export_dot() if args.format == "dot" else g.to_json() + "\n")
    return EXIT_OK


def cmd_plot_segments(args: argparse.Namespace, config: PipelineConfig) -> int:
    summarizer = DialogueSummarizer.build(config.model_copy(update={"segmentation": "always"}))
    documents = [_select_document(args.input, args.doc_id)] if args.doc_id else iter_documents(args.input)
    with _open_output(args.output) as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "gap", "distance", "boundary"])
        for tr in documents:
            sentences = summarizer.prepare(tr)
            # topic distances are computed even for pre-segmented input
            sentences = [replace(s, segment=None) for s in sentences]
            _, seg = summarizer.split_segments(tr, sentences)
            if seg is None:
                continue
            chosen = set(seg.boundaries)
            for gap, d in enumerate(seg.distances):
                writer.writerow([tr.doc_id, gap, f"{d:.6f}", int(gap in chosen)])
    return EXIT_OK


def _read_report(entry: str) -> tuple[str, dict[str, float]]:
    name, _, path = entry.rpartition("=")
    path_ = Path(path)
    try:
        data = json.loads(path_.read_text(encoding="utf-8"))
        means = {m: float(data["mean"][m]["f1"]) for m in rouge.METRICS}
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise TranscriptError(f"unreadable ROUGE report {path_}: {e}") from e
    return name or path_.stem, means


def cmd_plot_rouge(args: argparse.Namespace) -> int:
    datasets = dict(_read_report(entry) for entry in args.reports)
    spread = rouge.robustness(datasets)
    with _open_output(args.output) as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", *rouge.METRICS])
        for name, means in datasets.items():
            writer.writerow([name, *(f"{means[m]:.6f}" for m in rouge.METRICS)])
        writer.writerow(["normalized_std", *(f"{spread[m]:.6f}" for m in rouge.METRICS)])
    return EXIT_OK


# ---------------- entry point ----------------

def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        config = config_from_args(args) if hasattr(args, "config") else load_config()
    except ConfigError as e:
        setup_logging(False)
        logger.error("{}", e)
        return EXIT_CONFIG
    setup_logging(config.debug)

    try:
        if args.command == "summarize":
            return cmd_summarize(args, config)
        if args.command == "evaluate":
            return cmd_evaluate(args, config)
        if args.command == "pov":
            return cmd_pov(args, config)
        if args.command == "stats":
            return cmd_stats(args)
        if args.command == "build-lexicon":
            return cmd_build_lexicon(args)
        if args.command == "graph-dump":
            return cmd_graph_dump(args, config)
        if args.kind == "segments":
            return cmd_plot_segments(args, config)
        return cmd_plot_rouge(args)
    except ConfigError as e:
        logger.error("{}", e)
        return EXIT_CONFIG
    except (DialsumError, OSError) as e:
        logger.error("{}", e)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
