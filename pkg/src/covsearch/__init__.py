"""Coverage-based ranking and offline evaluation of grid-search results.

Given a table of (dataset, train size, split, configuration) scores from an
offline hyperparameter grid search, this package ranks configurations so
that the top few collectively cover as many datasets as possible, simulates
the value of that ranking on unseen datasets (leave-one-dataset-out and
budget curves), and quantifies how consistently each hyperparameter's
preferred values transfer across datasets.
"""

from .model import (
    BudgetCurve,
    BudgetDetail,
    BudgetPoint,
    ConfigSpace,
    Configuration,
    Context,
    CoverageRanking,
    CovsearchError,
    DataError,
    DegenerateContextError,
    EmptyContextError,
    FixedConfigResult,
    HpImportance,
    Hyperparameter,
    ImportanceReport,
    LooResult,
    LooScore,
    RankingEntry,
    ScoreRecord,
    ScoreTable,
    UpperBoundResult,
    ValidationError,
    canonical_value,
)
from .ingest import (
    CatalogEntry,
    CompletenessReport,
    ParseError,
    builtin_catalog,
    builtin_models,
    builtin_space,
    builtin_task_map,
    completeness_report,
    load_scores,
    load_space,
    load_task_map,
    parse_scores,
    parse_space,
    serialize_scores,
    serialize_space,
)
from .ranking import TopSet, normalize, rank, top_set
from .protocols import (
    CompareRow,
    budget_curve,
    compare_protocols,
    fixed_config_eval,
    loo_cbs,
    upper_bound,
)
from .importance import (
    importance_report,
    js_distance,
    js_score,
    permutation_pval,
    top_set_95,
    value_distribution,
)
from .synth import demo_space, synthetic_table

__version__ = "0.1.0"

__all__ = [
    "BudgetCurve",
    "BudgetDetail",
    "BudgetPoint",
    "CatalogEntry",
    "CompareRow",
    "CompletenessReport",
    "ConfigSpace",
    "Configuration",
    "Context",
    "CoverageRanking",
    "CovsearchError",
    "DataError",
    "DegenerateContextError",
    "EmptyContextError",
    "FixedConfigResult",
    "HpImportance",
    "Hyperparameter",
    "ImportanceReport",
    "LooResult",
    "LooScore",
    "ParseError",
    "RankingEntry",
    "ScoreRecord",
    "ScoreTable",
    "TopSet",
    "UpperBoundResult",
    "ValidationError",
    "budget_curve",
    "builtin_catalog",
    "builtin_models",
    "builtin_space",
    "builtin_task_map",
    "canonical_value",
    "compare_protocols",
    "completeness_report",
    "demo_space",
    "fixed_config_eval",
    "importance_report",
    "js_distance",
    "js_score",
    "load_scores",
    "load_space",
    "load_task_map",
    "loo_cbs",
    "normalize",
    "parse_scores",
    "parse_space",
    "permutation_pval",
    "rank",
    "serialize_scores",
    "serialize_space",
    "synthetic_table",
    "top_set",
    "top_set_95",
    "upper_bound",
    "value_distribution",
]
