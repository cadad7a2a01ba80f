"""Learn models of event-driven JavaScript APIs from listener registrations.

Pipeline: mine (path, event) listener-registration pairs from source
corpora, aggregate occurrence counts, classify pairs as anomalous /
expected / unclassified with two one-sided binomial rarity tests, and
check individual projects against the resulting model to flag likely
dead listeners.
"""

__version__ = "0.1.0"

from .paths import (
    AccessPath,
    Argument,
    CallReturn,
    Instance,
    PathSyntaxError,
    PropertyRead,
    parse_path,
    rewrite_chained_aliases,
    serialize_path,
)
from .jsparse import ParseError, SyntaxNode, SyntaxTree, parse_source
from .miner import (
    DefUseAnalysis,
    MiningDiagnostics,
    PairOccurrence,
    RawRegistration,
    extract_registrations,
    mine_project,
    mine_source,
)
from .corpus import (
    CountsIndex,
    EventKey,
    MissingPair,
    PairStats,
    aggregate,
    cumulative_count_for_event,
    cumulative_count_for_path,
    read_index_csv,
    read_occurrences,
    write_index_csv,
    write_occurrences,
)
from .classifier import (
    Classification,
    Config,
    DomainError,
    Model,
    Verdict,
    binomial_cdf,
    binomial_sf,
    classify_corpus,
    classify_pair,
    load_model,
    write_model,
)
from .evaluation import (
    ConfigResult,
    DuplicateLabel,
    EmptySubset,
    FoldResult,
    LabelKind,
    LabelNotInCorpus,
    LabelSyntaxError,
    LabeledPair,
    NoQualifyingConfig,
    ScoreReport,
    SubsetExperiment,
    SubsetResult,
    cross_validate,
    load_labels,
    pareto_front,
    score,
    select_optimal,
    subset_experiment,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
