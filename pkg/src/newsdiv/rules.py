"""Editorial rules: scoped predicates that filter, boost, or require.

Rules are validated against the schema at load time (an unknown aspect or
label fails immediately, never at apply time). Application is pure: input
profiles are never mutated, boosts come back as an adjustments map, and
require_at_least never alters the candidate list; it is reported as a
violation when the final selection falls short.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .aspect_model import AspectSchema, label_ancestors
from .errors import ValidationError
from .metrics import DocumentProfile

SCOPES = ("global", "context", "request")

# Scope precedence: global rules apply first, then active context rules,
# then request rules. Within a scope, file order is kept.
SCOPE_ORDER = {scope: i for i, scope in enumerate(SCOPES)}


@dataclass(frozen=True)
class Rule:
    id: str
    scope: str
    predicate: Mapping
    action: str  # "exclude" | "require_at_least" | "boost"
    value: float | int | None = None  # m for require_at_least, delta for boost
    context: str | None = None  # context tag, required for context scope


@dataclass(frozen=True)
class RuleSet:
    """Ordered rules plus the set of currently active context tags."""

    rules: tuple[Rule, ...]
    context_tags: frozenset[str] = frozenset()

    def __post_init__(self):
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"rule ids must be unique (duplicates: {dupes})")

    def active(self, request_rules: Sequence[Rule] = ()) -> list[Rule]:
        """Rules in evaluation order: global, active-context, request."""
        ordered = [r for r in self.rules if r.scope == "global"]
        ordered += [
            r
            for r in self.rules
            if r.scope == "context" and r.context in self.context_tags
        ]
        ordered += list(request_rules)
        return ordered


def validate_predicate(schema: AspectSchema, predicate, rule_id: str) -> None:
    """Reject predicates referencing anything outside the schema."""
    if not isinstance(predicate, dict) or not predicate:
        raise ValidationError(f"rule {rule_id!r}: predicate must be a non-empty object")
    if "all" in predicate or "any" in predicate:
        key = "all" if "all" in predicate else "any"
        branches = predicate[key]
        if not isinstance(branches, list) or not branches:
            raise ValidationError(
                f"rule {rule_id!r}: {key!r} must hold a non-empty list of predicates"
            )
        for branch in branches:
            validate_predicate(schema, branch, rule_id)
        return
    if "not" in predicate:
        validate_predicate(schema, predicate["not"], rule_id)
        return
    if "ancestor" in predicate:
        inner = predicate["ancestor"]
        if not isinstance(inner, dict) or "aspect" not in inner or "node" not in inner:
            raise ValidationError(
                f"rule {rule_id!r}: ancestor test needs 'aspect' and 'node'"
            )
        aspect = schema.aspect(inner["aspect"])
        if aspect.graph is None:
            raise ValidationError(
                f"rule {rule_id!r}: aspect {aspect.name!r} has no label graph "
                "for an ancestor test"
            )
        if inner["node"] not in set(aspect.graph.nodes):
            raise ValidationError(
                f"rule {rule_id!r}: unknown graph node {inner['node']!r} "
                f"for aspect {aspect.name!r}"
            )
        return
    if "aspect" in predicate:
        aspect = schema.aspect(predicate["aspect"])
        op = predicate.get("op", "eq")
        value = predicate.get("value")
        if op == "eq":
            values = [value]
        elif op == "in":
            if not isinstance(value, list) or not value:
                raise ValidationError(
                    f"rule {rule_id!r}: 'in' needs a non-empty list of labels"
                )
            values = value
        else:
            raise ValidationError(f"rule {rule_id!r}: unknown predicate op {op!r}")
        for v in values:
            if v not in aspect.label_set:
                raise ValidationError(
                    f"rule {rule_id!r}: unknown label {v!r} for aspect {aspect.name!r}"
                )
        return
    raise ValidationError(
        f"rule {rule_id!r}: predicate must be one of eq/in/all/any/not/ancestor "
        f"(got keys {sorted(predicate)})"
    )


def parse_rule(schema: AspectSchema, obj) -> Rule:
    """Build and validate a Rule from a parsed JSON object."""
    if not isinstance(obj, dict):
        raise ValidationError("each rule must be a JSON object")
    rule_id = obj.get("id")
    if not isinstance(rule_id, str) or not rule_id:
        raise ValidationError("each rule needs a non-empty string 'id'")
    scope = obj.get("scope")
    if scope not in SCOPES:
        raise ValidationError(
            f"rule {rule_id!r}: scope must be one of {list(SCOPES)} (got {scope!r})"
        )
    context = obj.get("context")
    if scope == "context" and not context:
        raise ValidationError(f"rule {rule_id!r}: context-scope rules need a 'context' tag")
    predicate = obj.get("predicate")
    validate_predicate(schema, predicate, rule_id)
    action_obj = obj.get("action")
    if not isinstance(action_obj, dict) or len(action_obj) != 1:
        raise ValidationError(
            f"rule {rule_id!r}: action must be exactly one of "
            "exclude / require_at_least / boost"
        )
    action, value = next(iter(action_obj.items()))
    if action == "exclude":
        value = None
    elif action == "require_at_least":
        if not isinstance(value, int) or value < 1:
            raise ValidationError(
                f"rule {rule_id!r}: require_at_least needs an integer m >= 1"
            )
    elif action == "boost":
        if not isinstance(value, (int, float)) or not -1.0 <= value <= 1.0:
            raise ValidationError(
                f"rule {rule_id!r}: boost delta must lie in [-1, 1] (got {value!r})"
            )
        value = float(value)
    else:
        raise ValidationError(f"rule {rule_id!r}: unknown action {action!r}")
    return Rule(
        id=rule_id,
        scope=scope,
        predicate=predicate,
        action=action,
        value=value,
        context=context,
    )


def matches(schema: AspectSchema, predicate: Mapping, doc: DocumentProfile) -> bool:
    """Evaluate a validated predicate against one document."""
    if "all" in predicate:
        return all(matches(schema, p, doc) for p in predicate["all"])
    if "any" in predicate:
        return any(matches(schema, p, doc) for p in predicate["any"])
    if "not" in predicate:
        return not matches(schema, predicate["not"], doc)
    if "ancestor" in predicate:
        inner = predicate["ancestor"]
        aspect = schema.aspect(inner["aspect"])
        label = doc.labels.get(inner["aspect"])
        if label is None:
            return False
        return inner["node"] in label_ancestors(aspect, label)
    aspect_name = predicate["aspect"]
    op = predicate.get("op", "eq")
    label = doc.labels.get(aspect_name)
    if op == "eq":
        return label == predicate["value"]
    return label in predicate["value"]  # op == "in"


@dataclass(frozen=True)
class RuleApplication:
    """Pure outcome of applying rules to a candidate list.

    candidates: surviving profiles, original objects, input order kept.
    adjusted_relevance: doc id -> clamped post-boost relevance (only boosted
    docs appear; unboosted docs keep their profile relevance).
    adjustments: exclude/boost records in application order.
    violations: unmet require_at_least records for the given candidates.
    """

    candidates: tuple[DocumentProfile, ...]
    adjusted_relevance: Mapping[str, float]
    adjustments: tuple[dict, ...]
    violations: tuple[dict, ...]


def apply_rules(
    schema: AspectSchema,
    ruleset: RuleSet,
    request_rules: Sequence[Rule],
    candidates: Sequence[DocumentProfile],
) -> RuleApplication:
    """Apply scoped rules to a candidate list.

    Evaluation order is global, then active-context, then request rules;
    excludes remove matching candidates immediately (later rules never see
    them), boosts adjust relevance with clamping to [0, 1], and
    require_at_least is checked against the surviving list and reported,
    never enforced. Input profiles are not mutated, so applying the same
    rules to the output reproduces the same survivors, adjustments, and
    violations (idempotence).
    """
    ordered = ruleset.active(request_rules)
    current = list(candidates)
    relevance = {d.id: d.relevance for d in current}
    adjustments: list[dict] = []
    requires: list[Rule] = []
    for rule in ordered:
        if rule.action == "exclude":
            kept = []
            for doc in current:
                if matches(schema, rule.predicate, doc):
                    adjustments.append(
                        {
                            "kind": "exclude",
                            "rule": rule.id,
                            "doc": doc.id,
                            "detail": f"rule {rule.id} excluded {doc.id}",
                        }
                    )
                else:
                    kept.append(doc)
            current = kept
        elif rule.action == "boost":
            for doc in current:
                if not matches(schema, rule.predicate, doc):
                    continue
                before = relevance[doc.id] if relevance[doc.id] is not None else 0.0
                after = min(1.0, max(0.0, before + rule.value))
                relevance[doc.id] = after
                adjustments.append(
                    {
                        "kind": "boost",
                        "rule": rule.id,
                        "doc": doc.id,
                        "delta": rule.value,
                        "before": before,
                        "after": after,
                        "detail": (
                            f"rule {rule.id} boosted {doc.id}: "
                            f"relevance {before:.12g} -> {after:.12g}"
                        ),
                    }
                )
        else:  # require_at_least, deferred
            requires.append(rule)

    violations = check_requirements(schema, requires, current)
    boosted = {
        d.id: relevance[d.id]
        for d in current
        if relevance[d.id] is not None and relevance[d.id] != d.relevance
    }
    return RuleApplication(
        candidates=tuple(current),
        adjusted_relevance=boosted,
        adjustments=tuple(adjustments),
        violations=violations,
    )


def check_requirements(
    schema: AspectSchema,
    require_rules: Sequence[Rule],
    docs: Sequence[DocumentProfile],
) -> tuple[dict, ...]:
    """Report require_at_least rules the given document list fails to meet."""
    violations = []
    for rule in require_rules:
        if rule.action != "require_at_least":
            continue
        found = sum(1 for d in docs if matches(schema, rule.predicate, d))
        if found < rule.value:
            violations.append(
                {
                    "kind": "violation",
                    "rule": rule.id,
                    "needed": rule.value,
                    "found": found,
                    "detail": (
                        f"rule {rule.id} requires at least {rule.value} matching "
                        f"documents, selection has {found}"
                    ),
                }
            )
    return tuple(violations)


def active_excludes(ruleset: RuleSet, request_rules: Sequence[Rule]) -> list[Rule]:
    return [r for r in ruleset.active(request_rules) if r.action == "exclude"]


def active_requires(ruleset: RuleSet, request_rules: Sequence[Rule]) -> list[Rule]:
    return [r for r in ruleset.active(request_rules) if r.action == "require_at_least"]


def explain_result(result, applied: RuleApplication | None = None) -> str:
    """Render a human-readable explanation of a diversification result.

    Works on a RerankResult or its serialized dict. Selected items show the
    marginal diversity contribution recorded when they were added; swap
    results show the swap narrative; rule effects (exclusions, boosts,
    violations) come from the trace plus the optional RuleApplication.
    """
    data = result.as_dict() if hasattr(result, "as_dict") else dict(result)
    trace = list(data.get("trace", []))
    if applied is not None:
        trace += [dict(a) for a in applied.adjustments]
        trace += [dict(v) for v in applied.violations]

    lines = []
    selected = data.get("selected", [])
    diversity = data.get("diversity", {})
    lines.append(f"selected: {', '.join(selected) if selected else '(empty)'}")
    if "overall" in diversity:
        lines.append(f"overall diversity: {diversity['overall']:.12g}")
        for aspect in sorted(diversity.get("per_aspect", {})):
            lines.append(
                f"  {aspect}: {diversity['per_aspect'][aspect]:.12g}"
            )
    if "objective" in data:
        lines.append(f"objective: {data['objective']:.12g}")
    if data.get("keyword_diversity") is not None:
        lines.append(f"keyword diversity: {data['keyword_diversity']:.12g}")

    adds = {t["doc"]: t for t in trace if t.get("kind") == "add"}
    seeds = {t["doc"]: t for t in trace if t.get("kind") == "seed"}
    boosts: dict[str, list[dict]] = {}
    for t in trace:
        if t.get("kind") == "boost":
            boosts.setdefault(t["doc"], []).append(t)
    lines.append("selection detail:")
    for rank, doc_id in enumerate(selected, start=1):
        parts = [f"  {rank}. {doc_id}"]
        if doc_id in seeds:
            parts.append("seed")
        elif doc_id in adds:
            rec = adds[doc_id]
            if "gain" in rec:
                parts.append(f"marginal diversity {rec['gain']:+.12g}")
            elif "score" in rec:
                parts.append(f"step score {rec['score']:.12g}")
        for b in boosts.get(doc_id, []):
            parts.append(f"boost {b['delta']:+.12g} by {b['rule']}")
        lines.append("  ".join(parts))

    swaps = [t for t in trace if t.get("kind") == "swap"]
    if swaps:
        lines.append("swaps:")
        for s in swaps:
            lines.append(
                f"  out {s['out']} in {s['in']}: "
                f"diversity {s['before']:.12g} -> {s['after']:.12g}"
            )

    rule_records = [
        t for t in trace if t.get("kind") in ("exclude", "boost", "violation")
    ]
    if rule_records:
        lines.append("rules:")
        for t in rule_records:
            if t["kind"] == "exclude":
                lines.append(f"  excluded {t['doc']} (rule {t['rule']})")
            elif t["kind"] == "boost":
                lines.append(
                    f"  boosted {t['doc']} by {t['delta']:+.12g} (rule {t['rule']})"
                )
            else:
                lines.append(
                    f"  VIOLATION: rule {t['rule']} needs {t['needed']} "
                    f"matching, selection has {t['found']}"
                )
    else:
        lines.append("rules: none")

    warnings = [t for t in trace if t.get("kind") == "warning"]
    for w in warnings:
        lines.append(f"warning: {w['detail']}")
    notes = [t for t in trace if t.get("kind") in ("next", "suggest", "note")]
    for t in notes:
        lines.append(f"note: {t['detail']}")
    return "\n".join(lines)
