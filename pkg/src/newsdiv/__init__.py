"""Multi-aspect diversity metrics and diversification for news lists."""

from .aspect_model import (
    Aspect,
    AspectSchema,
    DistanceTable,
    LabelGraph,
    derive_distances_from_graph,
    label_distance,
    load_schema,
    make_aspect,
)
from .corpus_io import (
    Corpus,
    load_corpus,
    load_history,
    load_interactions,
    load_rules,
    write_corpus,
    write_report,
)
from .diversify import (
    RerankRequest,
    RerankResult,
    exclude_history,
    greedy_select,
    next_in_sequence,
    rerank_combined,
    select_summary_sources,
    suggest_interaction,
    swap_diversify,
)
from .errors import (
    ContractError,
    DerivationError,
    GuardExceededError,
    NewsdivError,
    ParseError,
    UnknownEntityError,
    ValidationError,
)
from .metrics import (
    DiversityReport,
    DocumentProfile,
    InteractionLog,
    InteractionRecord,
    Keyword,
    Window,
    collection_diversity,
    doc_distance,
    entropy_diversity,
    interaction_diversity,
    keyword_diversity,
    per_aspect_diversity,
    window_diversity,
)
from .oracle import OracleResult, max_diversity_oracle, max_sequence_oracle
from .rules import Rule, RuleSet, apply_rules, explain_result

__version__ = "0.1.0"

__all__ = [
    "Aspect",
    "AspectSchema",
    "Corpus",
    "ContractError",
    "DerivationError",
    "DistanceTable",
    "DiversityReport",
    "DocumentProfile",
    "GuardExceededError",
    "InteractionLog",
    "InteractionRecord",
    "Keyword",
    "LabelGraph",
    "NewsdivError",
    "OracleResult",
    "ParseError",
    "RerankRequest",
    "RerankResult",
    "Rule",
    "RuleSet",
    "UnknownEntityError",
    "ValidationError",
    "Window",
    "apply_rules",
    "collection_diversity",
    "derive_distances_from_graph",
    "doc_distance",
    "entropy_diversity",
    "exclude_history",
    "explain_result",
    "greedy_select",
    "interaction_diversity",
    "keyword_diversity",
    "label_distance",
    "load_corpus",
    "load_history",
    "load_interactions",
    "load_rules",
    "load_schema",
    "make_aspect",
    "max_diversity_oracle",
    "max_sequence_oracle",
    "next_in_sequence",
    "per_aspect_diversity",
    "rerank_combined",
    "select_summary_sources",
    "suggest_interaction",
    "swap_diversify",
    "window_diversity",
    "write_corpus",
    "write_report",
]
