"""Offline evaluation protocols over a score table.

Four ways to answer "how good is a recommendation strategy on a dataset it
has never seen":

* fixed_config_eval: one configuration applied everywhere (the published-
  default baseline), reported as raw test scores with task macro-averages.
* upper_bound: per-context full grid search, selecting on validation and
  reporting on test.
* loo_cbs: leave-one-dataset-out simulation of the coverage ranking's
  single top recommendation.
* budget_curve: the same simulation with a budget of k ranked candidates,
  selecting among them on the held-out validation split.

Normalized test scores divide by the per-context test maximum, so 1.0 means
the held-out grid search could not have done better.  A flag switches the
budget-curve denominator to the upper-bound protocol's test score instead
(the validation-selected configuration's test score, which can sit below
the test maximum, letting ratios exceed 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import (
    BudgetCurve,
    BudgetDetail,
    BudgetPoint,
    ConfigSpace,
    Configuration,
    Context,
    CoverageRanking,
    DataError,
    FixedConfigResult,
    LooResult,
    LooScore,
    ScoreTable,
    UpperBoundResult,
    ValidationError,
)
from .ranking import DEFAULT_THRESHOLD, normalize, rank

DEFAULT_MAX_BUDGET = 10
NORMALIZE_MODES = ("test_max", "upper_bound")


def fixed_config_eval(
    table: ScoreTable,
    config: Configuration,
    contexts: Iterable[Context] | None = None,
    task_map: Mapping[str, str] | None = None,
) -> FixedConfigResult:
    """Raw test scores of one configuration plus per-task macro-averages.

    ``task_map`` maps dataset names to task labels; without one, all
    contexts fall into a single "all" group.  The macro-average is the
    unweighted mean over the contexts of each task.
    """
    table.space.validate_config(config)
    selected = sorted(set(contexts)) if contexts is not None else table.contexts("test")
    if not selected:
        raise DataError("no contexts to evaluate")
    missing = [ctx for ctx in selected if table.score(ctx, "test", config) is None]
    if missing:
        raise DataError(
            f"configuration ({config}) has no test record for context(s):"
            f" {', '.join(str(c) for c in missing)}"
        )
    if task_map is not None:
        unknown = sorted({ctx.dataset for ctx in selected} - set(task_map))
        if unknown:
            raise DataError(f"dataset(s) missing from task map: {unknown}")

    scores = tuple((ctx, table.score(ctx, "test", config)) for ctx in selected)
    groups: dict[str, list[float]] = {}
    for ctx, score in scores:
        task = task_map[ctx.dataset] if task_map is not None else "all"
        groups.setdefault(task, []).append(score)
    macro = tuple(
        (task, math.fsum(vals) / len(vals)) for task, vals in sorted(groups.items())
    )
    return FixedConfigResult(config=config, scores=scores, macro_averages=macro)


def upper_bound(table: ScoreTable, context: Context) -> UpperBoundResult:
    """Validation argmax of one context, reported on its test split.

    Validation ties break toward the configuration earliest in grid order.
    """
    val = table.scores(context, "validation")
    if not val:
        raise DataError(f"validation split unavailable for context {context}")
    if not table.scores(context, "test"):
        raise DataError(f"test split unavailable for context {context}")
    best_config, best_score = None, -1.0
    for cfg, score in val.items():  # grid order: first maximum wins ties
        if score > best_score:
            best_config, best_score = cfg, score
    test_score = table.score(context, "test", best_config)
    if test_score is None:
        raise DataError(
            f"validation-selected configuration ({best_config}) has no test"
            f" record for context {context}"
        )
    return UpperBoundResult(
        context=context,
        config=best_config,
        validation_score=best_score,
        test_score=test_score,
    )


def _select_contexts(
    table: ScoreTable,
    datasets: Sequence[str] | None,
    train_sizes: Sequence[int] | None,
) -> tuple[list[str], list[int]]:
    all_datasets = table.datasets()
    all_sizes = table.train_sizes()
    ds = sorted(set(datasets)) if datasets is not None else all_datasets
    sizes = sorted(set(train_sizes)) if train_sizes is not None else all_sizes
    unknown = [d for d in ds if d not in all_datasets]
    if unknown:
        raise DataError(f"dataset(s) not in table: {unknown}")
    unknown_sizes = [m for m in sizes if m not in all_sizes]
    if unknown_sizes:
        raise DataError(f"train size(s) not in table: {unknown_sizes}")
    return ds, sizes


def _held_out_ranking(
    table: ScoreTable,
    held_out: str,
    datasets: Sequence[str],
    train_sizes: Sequence[int],
    split: str,
    threshold: float,
    skip_degenerate: bool,
) -> CoverageRanking:
    contexts = [
        ctx
        for ctx in table.contexts(split)
        if ctx.dataset != held_out
        and ctx.dataset in datasets
        and ctx.train_size in train_sizes
    ]
    if not contexts:
        raise DataError(f"no contexts remain after holding out {held_out!r}")
    return rank(
        table, contexts, split=split, threshold=threshold, skip_degenerate=skip_degenerate
    )


def _held_out_contexts(
    table: ScoreTable, held_out: str, train_sizes: Sequence[int]
) -> list[Context]:
    contexts = [
        ctx
        for ctx in table.contexts("test")
        if ctx.dataset == held_out and ctx.train_size in train_sizes
    ]
    if not contexts:
        raise DataError(
            f"held-out dataset {held_out!r} has no test records for the"
            f" requested train sizes"
        )
    return contexts


def loo_cbs(
    table: ScoreTable,
    datasets: Sequence[str] | None = None,
    train_sizes: Sequence[int] | None = None,
    *,
    split: str = "test",
    threshold: float = DEFAULT_THRESHOLD,
    skip_degenerate: bool = False,
) -> list[LooResult]:
    """Leave-one-dataset-out evaluation of the top-ranked configuration.

    For each held-out dataset, a ranking is built once over all remaining
    datasets' contexts (all requested train sizes together); the rank-1
    configuration's raw and normalized test scores are then reported on
    each held-out (dataset, train size) context.
    """
    ds, sizes = _select_contexts(table, datasets, train_sizes)
    if len(ds) < 2:
        raise DataError("leave-one-out requires at least 2 datasets")
    results = []
    for held_out in ds:
        ranking = _held_out_ranking(
            table, held_out, ds, sizes, split, threshold, skip_degenerate
        )
        recommended = ranking.recommended
        scores = []
        for ctx in _held_out_contexts(table, held_out, sizes):
            raw = table.score(ctx, "test", recommended)
            if raw is None:
                raise DataError(
                    f"recommended configuration ({recommended}) has no test"
                    f" record on held-out context {ctx}"
                )
            normalized = normalize(table, ctx, "test")[recommended]
            scores.append(
                LooScore(context=ctx, test_score=raw, normalized_test_score=normalized)
            )
        results.append(
            LooResult(
                held_out_dataset=held_out,
                recommended_config=recommended,
                scores=tuple(scores),
                ranking=ranking,
            )
        )
    return results


def budget_curve(
    table: ScoreTable,
    datasets: Sequence[str] | None = None,
    train_sizes: Sequence[int] | None = None,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    max_budget: int = DEFAULT_MAX_BUDGET,
    split: str = "test",
    normalize_by: str = "test_max",
    skip_degenerate: bool = False,
) -> BudgetCurve:
    """Held-out performance when the practitioner can try k candidates.

    For each held-out (dataset, train size) and each budget k, the top-k
    ranked configurations compete on the held-out validation split; the
    winner's normalized test score enters the curve.  Validation ties break
    toward the earlier ranking position.  Budgets beyond the ranking length
    are clamped and flagged in the detail rows.
    """
    if max_budget < 1:
        raise ValidationError(f"max_budget must be >= 1, got {max_budget}")
    if normalize_by not in NORMALIZE_MODES:
        raise ValidationError(
            f"normalize_by must be one of {NORMALIZE_MODES}, got {normalize_by!r}"
        )
    ds, sizes = _select_contexts(table, datasets, train_sizes)
    if len(ds) < 2:
        raise DataError("leave-one-out requires at least 2 datasets")

    details: list[BudgetDetail] = []
    per_k: dict[int, list[float]] = {k: [] for k in range(1, max_budget + 1)}
    for held_out in ds:
        ranking = _held_out_ranking(
            table, held_out, ds, sizes, split, threshold, skip_degenerate
        )
        candidates = [entry.config for entry in ranking.entries]
        for ctx in _held_out_contexts(table, held_out, sizes):
            val = table.scores(ctx, "validation")
            if not val:
                raise DataError(f"validation split unavailable for context {ctx}")
            if normalize_by == "test_max":
                denominator = max(table.scores(ctx, "test").values())
            else:
                denominator = upper_bound(table, ctx).test_score
                if denominator <= 0:
                    raise DataError(
                        f"upper-bound test score is zero for context {ctx};"
                        f" cannot normalize"
                    )
            best_config, best_val = None, -1.0
            for k in range(1, max_budget + 1):
                if k <= len(candidates):
                    cfg = candidates[k - 1]
                    cand_val = val.get(cfg)
                    if cand_val is not None and cand_val > best_val:
                        best_config, best_val = cfg, cand_val
                if best_config is None:
                    raise DataError(
                        f"no top-{k} candidate has a validation record on {ctx}"
                    )
                test_score = table.score(ctx, "test", best_config)
                if test_score is None:
                    raise DataError(
                        f"selected configuration ({best_config}) has no test"
                        f" record on {ctx}"
                    )
                normalized = test_score / denominator
                per_k[k].append(normalized)
                details.append(
                    BudgetDetail(
                        k=k,
                        context=ctx,
                        config=best_config,
                        validation_score=best_val,
                        test_score=test_score,
                        normalized_test_score=normalized,
                        clamped=k > len(candidates),
                    )
                )
    points = tuple(
        BudgetPoint(k=k, mean_normalized_test_score=math.fsum(vals) / len(vals))
        for k, vals in sorted(per_k.items())
    )
    return BudgetCurve(
        points=points,
        details=tuple(details),
        threshold=threshold,
        split=split,
        normalize_by=normalize_by,
    )


@dataclass(frozen=True)
class CompareRow:
    """One task x train-size row of the protocol comparison report."""

    task: str
    train_size: int
    n_datasets: int
    default_score: float | None
    cbs1_score: float
    upper_bound_score: float

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "train_size": self.train_size,
            "n_datasets": self.n_datasets,
            "default": self.default_score,
            "cbs_1": self.cbs1_score,
            "upper_bound": self.upper_bound_score,
        }


def compare_protocols(
    table: ScoreTable,
    task_map: Mapping[str, str],
    default_config: Configuration | None = None,
    *,
    datasets: Sequence[str] | None = None,
    train_sizes: Sequence[int] | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    split: str = "test",
    skip_degenerate: bool = False,
) -> tuple[CompareRow, ...]:
    """Macro-averaged raw test scores per task and train size.

    Columns: the fixed default configuration (when given), the
    leave-one-out top recommendation, and the per-dataset upper bound.
    """
    ds, sizes = _select_contexts(table, datasets, train_sizes)
    unknown = sorted(set(ds) - set(task_map))
    if unknown:
        raise DataError(f"dataset(s) missing from task map: {unknown}")

    loo = {
        res.held_out_dataset: res
        for res in loo_cbs(
            table,
            ds,
            sizes,
            split=split,
            threshold=threshold,
            skip_degenerate=skip_degenerate,
        )
    }

    rows = []
    tasks = sorted({task_map[d] for d in ds})
    for task in tasks:
        members = [d for d in ds if task_map[d] == task]
        for size in sizes:
            contexts = [
                ctx
                for ctx in table.contexts("test")
                if ctx.dataset in members and ctx.train_size == size
            ]
            if not contexts:
                continue
            cbs1_scores = []
            for ctx in contexts:
                match = [
                    s for s in loo[ctx.dataset].scores if s.context == ctx
                ]
                cbs1_scores.append(match[0].test_score)
            ub_scores = [upper_bound(table, ctx).test_score for ctx in contexts]
            default_score = None
            if default_config is not None:
                fixed = fixed_config_eval(table, default_config, contexts)
                default_score = fixed.macro_map["all"]
            rows.append(
                CompareRow(
                    task=task,
                    train_size=size,
                    n_datasets=len(contexts),
                    default_score=default_score,
                    cbs1_score=math.fsum(cbs1_scores) / len(cbs1_scores),
                    upper_bound_score=math.fsum(ub_scores) / len(ub_scores),
                )
            )
    return tuple(rows)
