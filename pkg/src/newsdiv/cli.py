"""Command line interface.

Subcommands: score, rerank, oracle, explain. All input comes from files,
all primary output goes to stdout (JSON except explain, which prints text).
Exit codes: 0 success, 1 I/O error, 2 validation/contract error, 3
enumeration guard exceeded. Output is byte-deterministic for fixed inputs.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace

from . import corpus_io, diversify, rules as rules_mod
from .aspect_model import AspectSchema, load_schema
from .errors import (
    ContractError,
    GuardExceededError,
    NewsdivError,
    ParseError,
    UnknownEntityError,
    ValidationError,
)
from .metrics import (
    InteractionLog,
    InteractionRecord,
    Window,
    collection_diversity,
    interaction_diversity,
    parse_window,
    window_slice,
)
from .oracle import max_diversity_oracle

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_GUARD = 3


@dataclass(frozen=True)
class CliConfig:
    """Resolved file inputs for one invocation."""

    schema_path: str
    corpus_path: str
    rules_path: str | None = None
    interactions_path: str | None = None
    history_path: str | None = None


def _config(args) -> CliConfig:
    return CliConfig(
        schema_path=args.schema,
        corpus_path=args.corpus,
        rules_path=getattr(args, "rules", None),
        interactions_path=getattr(args, "interactions", None),
        history_path=getattr(args, "history", None),
    )


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_schema_corpus(cfg: CliConfig) -> tuple[AspectSchema, corpus_io.Corpus]:
    schema = load_schema(_read(cfg.schema_path))
    corpus = corpus_io.load_corpus(schema, _read(cfg.corpus_path))
    return schema, corpus


def cmd_score(args) -> int:
    schema, corpus = _load_schema_corpus(_config(args))
    if args.ids:
        wanted = [i.strip() for i in args.ids.split(",") if i.strip()]
        missing = sorted(set(wanted) - set(corpus.documents))
        if missing:
            raise UnknownEntityError(f"unknown document ids: {missing}")
        docs = [corpus.documents[i] for i in wanted]
    else:
        docs = corpus.docs()
    report = collection_diversity(schema, docs)
    sys.stdout.write(corpus_io.write_report(report, "json"))
    return EXIT_OK


def _load_rules(cfg: CliConfig, context_tags, schema):
    if not cfg.rules_path:
        return rules_mod.RuleSet(rules=()), []
    ruleset, request_rules = corpus_io.load_rules(schema, _read(cfg.rules_path))
    if context_tags:
        ruleset = rules_mod.RuleSet(
            rules=ruleset.rules, context_tags=frozenset(context_tags)
        )
    return ruleset, request_rules


def _history_profiles(cfg: CliConfig, corpus):
    """Consumption events as profiles re-stamped with event timestamps."""
    events = corpus_io.load_history(_read(cfg.history_path))
    missing = sorted({doc_id for doc_id, _ in events if doc_id not in corpus.documents})
    if missing:
        raise UnknownEntityError(f"history references unknown documents: {missing}")
    return [
        replace(corpus.documents[doc_id], timestamp=ts) for doc_id, ts in events
    ]


def cmd_rerank(args) -> int:
    cfg = _config(args)
    schema, corpus = _load_schema_corpus(cfg)
    ruleset, request_rules = _load_rules(cfg, args.context, schema)

    history = []
    if cfg.history_path:
        history = _history_profiles(cfg, corpus)
    candidates = diversify.exclude_history(
        corpus.docs(), {d.id for d in history}
    )
    application = rules_mod.apply_rules(schema, ruleset, request_rules, candidates)
    survivors = list(application.candidates)
    if application.adjusted_relevance:
        survivors = [
            replace(d, relevance=application.adjusted_relevance[d.id])
            if d.id in application.adjusted_relevance
            else d
            for d in survivors
        ]

    if args.mode == "list":
        if args.lambda_ is not None:
            result = diversify.rerank_combined(schema, survivors, args.k, args.lambda_)
        else:
            if args.k < 1 or args.k > len(survivors):
                raise ContractError(
                    f"k must satisfy 1 <= k <= {len(survivors)} surviving candidates "
                    f"(got k={args.k})"
                )
            initial = survivors[: args.k]
            pool = survivors[args.k:]
            result = diversify.swap_diversify(schema, initial, pool, budget=args.k)
    elif args.mode == "summary":
        result = diversify.select_summary_sources(schema, survivors, args.k)
    elif args.mode == "sequence":
        if not cfg.history_path:
            raise ContractError("sequence mode requires --history")
        window = parse_window(args.window) if args.window else Window("last", len(history))
        chosen = diversify.next_in_sequence(
            schema, history, survivors, window, gamma=args.gamma
        )
        post = collection_diversity(
            schema, window_slice(history, window) + [corpus.documents[chosen]]
        )
        doc = corpus.documents[chosen]
        result = diversify.RerankResult(
            selected=(chosen,),
            diversity=collection_diversity(schema, [doc]),
            objective=post.overall,
            trace=(
                {
                    "kind": "next",
                    "doc": chosen,
                    "window_diversity": post.overall,
                    "detail": (
                        f"next item {chosen}: windowed diversity with it "
                        f"{post.overall:.12g}"
                    ),
                },
            ),
        )
    elif args.mode == "interaction":
        if not cfg.interactions_path:
            raise ContractError("interaction mode requires --interactions")
        weights = json.loads(args.type_weights) if args.type_weights else None
        log = corpus_io.load_interactions(_read(cfg.interactions_path), weights)
        logged = {(r.doc, r.type) for r in log.records}
        options = [
            (doc.id, itype)
            for doc in survivors
            for itype in sorted(log.type_weights)
            if (doc.id, itype) not in logged
        ]
        if not options:
            raise ContractError("no interaction options remain to suggest")
        doc_id, itype = diversify.suggest_interaction(
            schema, dict(corpus.documents), log, options
        )
        record = InteractionRecord(
            user="suggestion",
            doc=doc_id,
            type=itype,
            ts=max((r.ts for r in log.records), default=0) + 1,
        )
        ext_log = InteractionLog(
            records=log.records + (record,), type_weights=log.type_weights
        )
        overall = interaction_diversity(schema, dict(corpus.documents), ext_log)
        doc = corpus.documents[doc_id]
        result = diversify.RerankResult(
            selected=(doc_id,),
            diversity=collection_diversity(schema, [doc]),
            objective=overall,
            trace=(
                {
                    "kind": "suggest",
                    "doc": doc_id,
                    "type": itype,
                    "overall": overall,
                    "detail": (
                        f"suggest {itype} on {doc_id}: extended interaction "
                        f"diversity {overall:.12g}"
                    ),
                },
            ),
        )
    else:  # argparse choices prevent this
        raise ContractError(f"unknown mode {args.mode!r}")

    selected_docs = [corpus.documents[i] for i in result.selected]
    violations = rules_mod.check_requirements(
        schema, rules_mod.active_requires(ruleset, request_rules), selected_docs
    )
    trace = tuple(application.adjustments) + result.trace + violations
    result = replace(result, trace=trace)
    sys.stdout.write(corpus_io.write_report(result, "json"))
    return EXIT_OK


def cmd_oracle(args) -> int:
    schema, corpus = _load_schema_corpus(_config(args))
    result = max_diversity_oracle(schema, corpus.docs(), args.k)
    sys.stdout.write(corpus_io.write_report(result, "json"))
    return EXIT_OK


def cmd_explain(args) -> int:
    text = _read(args.result)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"result file is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict) or "selected" not in data:
        raise ValidationError("result file does not look like a rerank result")
    sys.stdout.write(rules_mod.explain_result(data) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsdiv",
        description="Multi-aspect diversity scoring and diversification for news lists.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="diversity report for a corpus or id subset")
    score.add_argument("--schema", required=True)
    score.add_argument("--corpus", required=True)
    score.add_argument("--ids", help="comma-separated document ids (default: all)")
    score.set_defaults(func=cmd_score)

    rerank = sub.add_parser("rerank", help="diversify via one of the four modes")
    rerank.add_argument("--schema", required=True)
    rerank.add_argument("--corpus", required=True)
    rerank.add_argument(
        "--mode", required=True, choices=["list", "sequence", "summary", "interaction"]
    )
    rerank.add_argument("--k", type=int, required=True)
    rerank.add_argument("--lambda", dest="lambda_", type=float, default=None,
                        help="relevance/diversity blend for list mode")
    rerank.add_argument("--window", default=None, help="'last:K' or 'cutoff:TS'")
    rerank.add_argument("--gamma", type=float, default=diversify.DEFAULT_GAMMA,
                        help="recency decay for sequence tie-breaks")
    rerank.add_argument("--rules", default=None, help="JSONL rules file")
    rerank.add_argument("--history", default=None, help="JSONL consumption history")
    rerank.add_argument("--interactions", default=None, help="JSONL interaction log")
    rerank.add_argument("--context", action="append", default=[],
                        help="activate a context tag (repeatable)")
    rerank.add_argument("--type-weights", default=None,
                        help="JSON object of interaction type weights")
    rerank.set_defaults(func=cmd_rerank)

    oracle = sub.add_parser("oracle", help="exact best-diversity subset (guarded)")
    oracle.add_argument("--schema", required=True)
    oracle.add_argument("--corpus", required=True)
    oracle.add_argument("--k", type=int, required=True)
    oracle.set_defaults(func=cmd_oracle)

    explain = sub.add_parser("explain", help="narrate a rerank result file")
    explain.add_argument("--result", required=True)
    explain.set_defaults(func=cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (OSError, IOError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NewsdivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
