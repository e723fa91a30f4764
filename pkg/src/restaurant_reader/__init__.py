"""Mental-model construction and question answering for restaurant stories.

The package turns a short narrative, given as a logic-form list of sorted
entities and step-indexed observations, into the set of mental models a
cautious reader would build: who intends what, which actions fill the gaps
between the observed ones, and what explains any deviation from the usual
course of a restaurant visit. Query answering is cautious: yes only when a
claim holds in every model.
"""

from restaurant_reader.logicform import (
    Diagnostic,
    EntityDecl,
    Observation,
    Story,
    StorySyntaxError,
    parse_story,
    serialize_story,
    validate_story,
)
from restaurant_reader.domain import DomainError, DomainSpec, build_restaurant_domain
from restaurant_reader.reasoner import (
    Config,
    Explanation,
    Model,
    Result,
    SolveTimeout,
    default_max_steps,
    enumerate_mappings,
    explain,
    solve,
)
from restaurant_reader.queries import (
    Answer,
    Query,
    QueryError,
    answer,
    explicit_actions,
    generate_queries,
    parse_query,
)
from restaurant_reader.corpus import (
    BenchRow,
    CorpusEntry,
    CorpusError,
    RunResult,
    bench,
    bundled_corpus_path,
    distribution,
    load_corpus,
    run_entry,
)

__all__ = [
    "Answer",
    "BenchRow",
    "Config",
    "CorpusEntry",
    "CorpusError",
    "Diagnostic",
    "DomainError",
    "DomainSpec",
    "EntityDecl",
    "Explanation",
    "Model",
    "Observation",
    "Query",
    "QueryError",
    "Result",
    "RunResult",
    "SolveTimeout",
    "Story",
    "StorySyntaxError",
    "answer",
    "bench",
    "build_restaurant_domain",
    "bundled_corpus_path",
    "default_max_steps",
    "distribution",
    "enumerate_mappings",
    "explain",
    "explicit_actions",
    "generate_queries",
    "load_corpus",
    "parse_query",
    "parse_story",
    "run_entry",
    "serialize_story",
    "solve",
    "validate_story",
]

__version__ = "0.1.0"
