"""Coverage-based ranking of grid-search results.

Per (dataset, train size) context, scores are normalized by the context
maximum, and the configurations strictly above a threshold band form the
context's top set.  Each configuration's score sum adds up its normalized
scores over the contexts where it made the top set.  A configuration covers
a context when it is in that context's top set and no configuration with a
strictly larger score sum is.  The final ranking orders configurations by
how many contexts they cover.

Determinism: contexts are processed in sorted order, configurations in grid
order, and score sums use exact (fsum) accumulation, so equal inputs yield
bit-identical rankings regardless of record order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

from .model import (
    Configuration,
    Context,
    CoverageRanking,
    DataError,
    DegenerateContextError,
    EmptyContextError,
    RankingEntry,
    ScoreTable,
    ValidationError,
    SPLITS,
)

DEFAULT_THRESHOLD = 0.97


@dataclass(frozen=True)
class TopSet:
    """Configurations within the threshold band of one context's best score.

    Members carry their normalized score and are listed in grid order; the
    context argmax (normalized score exactly 1.0) is always a member.
    """

    context: Context
    split: str
    threshold: float
    members: tuple[tuple[Configuration, float], ...]

    @property
    def configs(self) -> tuple[Configuration, ...]:
        return tuple(cfg for cfg, _ in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, config: Configuration) -> bool:
        return any(cfg == config for cfg, _ in self.members)


def _check_split(split: str) -> None:
    if split not in SPLITS:
        raise ValidationError(f"split must be one of {SPLITS}, got {split!r}")


def _check_threshold(threshold: float) -> None:
    if not 0 < threshold < 1:
        raise ValidationError(f"threshold must be in (0, 1), got {threshold!r}")


def normalize(
    table: ScoreTable, context: Context, split: str
) -> dict[Configuration, float]:
    """Scores of one (context, split) divided by their maximum.

    The configuration(s) attaining the maximum map to exactly 1.0.  Raises
    EmptyContextError when no records exist and DegenerateContextError when
    the maximum score is zero.
    """
    _check_split(split)
    rows = table.scores(context, split)
    if not rows:
        raise EmptyContextError(f"empty context: no {split} records for {context}")
    best = max(rows.values())
    if best <= 0:
        raise DegenerateContextError(
            f"degenerate context: all {split} scores are zero for {context}"
        )
    return {cfg: score / best for cfg, score in rows.items()}


def top_set(
    table: ScoreTable,
    context: Context,
    split: str,
    threshold: float = DEFAULT_THRESHOLD,
) -> TopSet:
    """Configurations with normalized score strictly above the threshold."""
    _check_threshold(threshold)
    normalized = normalize(table, context, split)
    members = tuple(
        (cfg, sn) for cfg, sn in normalized.items() if sn > threshold
    )
    return TopSet(context=context, split=split, threshold=threshold, members=members)


def rank(
    table: ScoreTable,
    contexts: Iterable[Context] | None = None,
    split: str = "test",
    threshold: float = DEFAULT_THRESHOLD,
    *,
    skip_degenerate: bool = False,
) -> CoverageRanking:
    """Build the coverage ranking over the given contexts.

    ``contexts`` defaults to every context with records for ``split``.
    Degenerate contexts (all-zero scores) are a hard error unless
    ``skip_degenerate`` is set, in which case they are dropped with a
    warning and excluded from the ranking provenance.
    """
    _check_split(split)
    _check_threshold(threshold)
    if contexts is None:
        selected = table.contexts(split)
    else:
        selected = sorted(set(contexts))
    if not selected:
        raise DataError("no contexts to rank over")

    top_sets: dict[Context, TopSet] = {}
    for ctx in selected:
        try:
            top_sets[ctx] = top_set(table, ctx, split, threshold)
        except DegenerateContextError:
            if not skip_degenerate:
                raise
            warnings.warn(f"skipping degenerate context {ctx}", stacklevel=2)
    if not top_sets:
        raise DataError("all requested contexts are degenerate")

    used = sorted(top_sets)

    # Score sum per configuration over the contexts where it is a top-set
    # member.  fsum makes the result independent of accumulation order.
    member_scores: dict[Configuration, list[float]] = {}
    for ctx in used:
        for cfg, sn in top_sets[ctx].members:
            member_scores.setdefault(cfg, []).append(sn)
    score_sum = {cfg: math.fsum(vals) for cfg, vals in member_scores.items()}

    # A configuration covers a context iff it is in the top set and ties the
    # maximal score sum there; no strictly higher-ranked member can then be
    # present, which is the set-difference definition in closed form.
    coverage: dict[Configuration, set[Context]] = {cfg: set() for cfg in score_sum}
    for ctx in used:
        members = top_sets[ctx].configs
        best = max(score_sum[cfg] for cfg in members)
        for cfg in members:
            if score_sum[cfg] == best:
                coverage[cfg].add(ctx)

    index = table.space.config_index
    ordered = sorted(
        score_sum,
        key=lambda cfg: (-len(coverage[cfg]), -score_sum[cfg], index(cfg)),
    )
    entries = tuple(
        RankingEntry(
            config=cfg,
            score_sum=score_sum[cfg],
            coverage=frozenset(coverage[cfg]),
        )
        for cfg in ordered
    )
    return CoverageRanking(
        entries=entries, contexts=tuple(used), split=split, threshold=threshold
    )
