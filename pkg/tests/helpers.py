"""Shared builders for the test suite: tiny spaces, tables, random instances."""

from __future__ import annotations

import numpy as np

from covsearch import (
    ConfigSpace,
    Context,
    Hyperparameter,
    ScoreRecord,
    ScoreTable,
)


def make_space(*hps: tuple[str, str, list[str]], label: str = "test") -> ConfigSpace:
    return ConfigSpace(
        hyperparameters=tuple(Hyperparameter(n, k, tuple(d)) for n, k, d in hps),
        label=label,
    )


def cat_space(domain_sizes: list[int], label: str = "test") -> ConfigSpace:
    """Categorical space h0, h1, ... with values v0..v(k-1) per domain."""
    return make_space(
        *(
            (f"h{i}", "categorical", [f"v{j}" for j in range(k)])
            for i, k in enumerate(domain_sizes)
        ),
        label=label,
    )


def build_table(space: ConfigSpace, per_split: dict) -> ScoreTable:
    """Build a table from {split: {(dataset, size): {values_tuple: score}}}."""
    records = []
    for split, by_context in per_split.items():
        for (dataset, size), rows in by_context.items():
            ctx = Context(dataset=dataset, train_size=size)
            for values, score in rows.items():
                if isinstance(values, str):
                    values = (values,)
                cfg = space.configuration(values)
                records.append(
                    ScoreRecord(context=ctx, split=split, config=cfg, score=score)
                )
    return ScoreTable(space, records)


def random_instance(
    seed: int,
    *,
    max_hps: int = 4,
    max_values: int = 3,
    max_contexts: int = 6,
    splits: tuple[str, ...] = ("test",),
    partial: bool = False,
    min_datasets: int = 1,
):
    """Random small instance: (space, table, raw scores per split).

    Raw scores are plain dicts {(dataset, size): {values_tuple: score}}
    keyed the way the reference implementations expect.
    """
    rng = np.random.default_rng(seed)
    n_hps = int(rng.integers(1, max_hps + 1))
    domains = [int(rng.integers(1, max_values + 1)) for _ in range(n_hps)]
    space = cat_space(domains, label=f"rand-{seed}")
    grid = space.grid()

    n_datasets = int(rng.integers(min_datasets, max(min_datasets, max_contexts) + 1))
    n_datasets = min(n_datasets, max_contexts)
    max_sizes = max(1, max_contexts // n_datasets)
    n_sizes = int(rng.integers(1, min(2, max_sizes) + 1))
    datasets = [f"d{i}" for i in range(n_datasets)]
    sizes = [100, 1000][:n_sizes]

    raw: dict[str, dict] = {split: {} for split in splits}
    for split in splits:
        for dataset in datasets:
            for size in sizes:
                keep = rng.random(len(grid)) < 0.8 if partial else np.ones(len(grid), bool)
                if partial and not keep.any():
                    keep[int(rng.integers(len(grid)))] = True
                scores = rng.uniform(0.01, 1.0, size=len(grid))
                raw[split][(dataset, size)] = {
                    cfg.values: float(s)
                    for cfg, s, k in zip(grid, scores, keep)
                    if k
                }
    table = build_table(space, raw)
    return space, table, raw


def ranking_as_tuples(ranking):
    """Library ranking in the oracle's vocabulary, for exact comparison."""
    return [
        (
            e.config.values,
            e.score_sum,
            frozenset((c.dataset, c.train_size) for c in e.coverage),
        )
        for e in ranking.entries
    ]
