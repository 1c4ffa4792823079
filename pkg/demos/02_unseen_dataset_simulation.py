#!/usr/bin/env python3
"""Estimate what a ranked portfolio is worth on a dataset you have not seen.

Leave-one-dataset-out: rebuild the ranking without one dataset, then check
how its top recommendation scores there.  The budget curve extends this to
k candidates: try the top k, keep the validation winner, report its test
score normalized by the held-out grid's best.
"""

from covsearch import budget_curve, demo_space, loo_cbs, synthetic_table, upper_bound
from covsearch.report import render_budget, render_loo

space = demo_space()
table = synthetic_table(space, datasets=8, train_sizes=(100, 1000),
                        correlation=0.55, noise=0.2, seed=21)

results = loo_cbs(table, threshold=0.97)
print(render_loo(results))

# The same simulation with a growing trial budget.  The k = 1 point equals
# the leave-one-out mean above by construction; more budget can only help
# validation-side selection.
curve = budget_curve(table, threshold=0.97, max_budget=8)
print(render_budget(curve))

# Upper bound for one context: full grid search on its validation split,
# reported on test.  This is what the budget curve converges toward.
ctx = table.contexts("test")[0]
ub = upper_bound(table, ctx)
print(f"upper bound on {ctx}: {ub.config}")
print(f"  validation={ub.validation_score:.3f} test={ub.test_score:.3f}")
