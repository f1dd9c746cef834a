"""Loading and writing the engine's line-delimited JSON file formats.

Corpus files hold one document object per line; interaction and history
files hold one event per line. Errors carry 1-based line numbers. Reports
serialize deterministically with numbers at 12 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .aspect_model import AspectSchema
from .diversify import RerankResult
from .errors import ParseError, ValidationError
from .metrics import (
    DiversityReport,
    DocumentProfile,
    InteractionLog,
    InteractionRecord,
    Keyword,
)
from .oracle import OracleResult
from .rules import Rule, RuleSet, parse_rule


@dataclass(frozen=True)
class Corpus:
    """Validated documents keyed by id, bound to their schema."""

    schema: AspectSchema
    documents: Mapping[str, DocumentProfile] = field(default_factory=dict)

    def docs(self) -> list[DocumentProfile]:
        return list(self.documents.values())


def _iter_jsonl(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON: {exc.msg}") from exc


def _parse_keywords(lineno: int, doc_id: str, raw) -> tuple[Keyword, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ValidationError(f"line {lineno}: 'keywords' for {doc_id!r} must be a list")
    keywords = []
    for entry in raw:
        if (
            not isinstance(entry, dict)
            or not isinstance(entry.get("term"), str)
            or not isinstance(entry.get("labels"), dict)
        ):
            raise ValidationError(
                f"line {lineno}: keyword entries need a 'term' and a 'labels' map"
            )
        keywords.append(Keyword(term=entry["term"], labels=dict(entry["labels"])))
    return tuple(keywords)


def validate_labels(schema: AspectSchema, labels: Mapping[str, str], where: str) -> None:
    """Exactly one known label per schema aspect; nothing else."""
    names = set(schema.aspect_names())
    extra = set(labels) - names
    if extra:
        raise ValidationError(f"{where}: labels for unknown aspects {sorted(extra)}")
    for aspect in schema.aspects:
        if aspect.name not in labels:
            raise ValidationError(f"{where}: missing label for aspect {aspect.name!r}")
        value = labels[aspect.name]
        if value not in aspect.label_set:
            raise ValidationError(
                f"{where}: unknown {aspect.name} label {value!r}"
            )


def load_corpus(schema: AspectSchema, text: str) -> Corpus:
    """Parse a JSONL corpus, validating every document against the schema.

    Line format:
        {"id": "a1", "labels": {"topic": "Climate", "frame": "Health"},
         "relevance": 0.9, "timestamp": 1700000000, "keywords": [...]}

    relevance, timestamp, and keywords are optional. Duplicate ids and any
    schema violation raise with the offending line number.
    """
    documents: dict[str, DocumentProfile] = {}
    for lineno, obj in _iter_jsonl(text):
        if not isinstance(obj, dict):
            raise ValidationError(f"line {lineno}: document must be a JSON object")
        doc_id = obj.get("id")
        if not isinstance(doc_id, str) or not doc_id:
            raise ValidationError(f"line {lineno}: document needs a non-empty string 'id'")
        if doc_id in documents:
            raise ValidationError(f"line {lineno}: duplicate document id {doc_id!r}")
        labels = obj.get("labels")
        if not isinstance(labels, dict):
            raise ValidationError(f"line {lineno}: document {doc_id!r} needs a 'labels' map")
        validate_labels(schema, labels, f"line {lineno}")
        relevance = obj.get("relevance")
        if relevance is not None:
            if not isinstance(relevance, (int, float)) or not 0.0 <= relevance <= 1.0:
                raise ValidationError(
                    f"line {lineno}: relevance for {doc_id!r} must lie in [0, 1] "
                    f"(got {relevance!r})"
                )
            relevance = float(relevance)
        timestamp = obj.get("timestamp")
        if timestamp is not None and not isinstance(timestamp, int):
            raise ValidationError(
                f"line {lineno}: timestamp for {doc_id!r} must be an integer"
            )
        keywords = _parse_keywords(lineno, doc_id, obj.get("keywords"))
        for kw in keywords:
            validate_labels(schema, kw.labels, f"line {lineno}: keyword {kw.term!r}")
        documents[doc_id] = DocumentProfile(
            id=doc_id,
            labels=dict(labels),
            relevance=relevance,
            timestamp=timestamp,
            keywords=keywords,
        )
    return Corpus(schema=schema, documents=documents)


def write_corpus(corpus: Corpus) -> str:
    """Serialize a corpus back to JSONL; load(write(load(x))) == load(x)."""
    lines = []
    for doc in corpus.documents.values():
        obj: dict = {"id": doc.id, "labels": dict(doc.labels)}
        if doc.relevance is not None:
            obj["relevance"] = doc.relevance
        if doc.timestamp is not None:
            obj["timestamp"] = doc.timestamp
        if doc.keywords:
            obj["keywords"] = [
                {"term": kw.term, "labels": dict(kw.labels)} for kw in doc.keywords
            ]
        lines.append(json.dumps(obj, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def load_interactions(
    text: str, type_weights: Mapping[str, float] | None = None
) -> InteractionLog:
    """Parse a JSONL interaction log.

    Line format: {"user": "u1", "doc": "a1", "type": "like", "ts": 1700000100}

    When type_weights is omitted, weights are uniform over the types present
    in the log.
    """
    records = []
    for lineno, obj in _iter_jsonl(text):
        if not isinstance(obj, dict):
            raise ValidationError(f"line {lineno}: interaction must be a JSON object")
        for key, kind in (("user", str), ("doc", str), ("type", str), ("ts", int)):
            if not isinstance(obj.get(key), kind):
                raise ValidationError(
                    f"line {lineno}: interaction needs {key!r} of type {kind.__name__}"
                )
        records.append(
            InteractionRecord(
                user=obj["user"], doc=obj["doc"], type=obj["type"], ts=obj["ts"]
            )
        )
    if type_weights is None:
        types = sorted({r.type for r in records})
        if not types:
            raise ValidationError("interaction log is empty and no type weights given")
        type_weights = {t: 1.0 / len(types) for t in types}
    return InteractionLog(records=tuple(records), type_weights=dict(type_weights))


def load_history(text: str) -> list[tuple[str, int]]:
    """Parse a JSONL consumption history of {"doc": id, "ts": int} events."""
    events = []
    for lineno, obj in _iter_jsonl(text):
        if (
            not isinstance(obj, dict)
            or not isinstance(obj.get("doc"), str)
            or not isinstance(obj.get("ts"), int)
        ):
            raise ValidationError(
                f"line {lineno}: history events need a string 'doc' and integer 'ts'"
            )
        events.append((obj["doc"], obj["ts"]))
    return events


def load_rules(schema: AspectSchema, text: str) -> tuple[RuleSet, list[Rule]]:
    """Parse a JSONL rules file into (ruleset, request-scope rules).

    Global and context rules form the RuleSet; request-scope rules ride
    separately since they apply per request. Context tags start empty; the
    caller activates them.
    """
    persistent = []
    request_rules = []
    seen = set()
    for lineno, obj in _iter_jsonl(text):
        try:
            rule = parse_rule(schema, obj)
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        if rule.id in seen:
            raise ValidationError(f"line {lineno}: duplicate rule id {rule.id!r}")
        seen.add(rule.id)
        if rule.scope == "request":
            request_rules.append(rule)
        else:
            persistent.append(rule)
    return RuleSet(rules=tuple(persistent)), request_rules


def round12(value):
    """Round floats (recursively) to 12 significant digits for output."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round12(v) for v in value]
    return value


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _report_csv(report: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["aspect", "value"])
    for aspect in sorted(report.get("per_aspect", {})):
        writer.writerow([aspect, _fmt(report["per_aspect"][aspect])])
    writer.writerow(["overall", _fmt(report["overall"])])
    writer.writerow(["pair_count", report["pair_count"]])
    return out.getvalue()


def _selection_csv(result: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rank", "id"])
    for rank, doc_id in enumerate(result.get("selected", result.get("best_subset", [])), start=1):
        writer.writerow([rank, doc_id])
    return out.getvalue()


def write_report(obj, fmt: str = "json") -> str:
    """Serialize a DiversityReport, RerankResult, or OracleResult.

    JSON output is sorted-key, 12-significant-digit, newline-terminated.
    CSV gives (aspect, value) rows for reports and (rank, id) rows for
    selections; an empty selection is just the header.
    """
    if fmt not in ("json", "csv"):
        raise ValidationError(f"unknown report format {fmt!r}")
    if isinstance(obj, (DiversityReport, RerankResult, OracleResult)):
        data = obj.as_dict()
    elif isinstance(obj, dict):
        data = obj
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__} as a report")
    data = round12(data)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    if "overall" in data and "selected" not in data:
        return _report_csv(data)
    return _selection_csv(data)
