#!/usr/bin/env python3
"""Browse the bundled configuration catalog.

The package ships ready-made, coverage-ranked configuration lists for two
open 7-8B models under full fine-tuning and LoRA, next to the
publicly-recommended defaults they were compared against, plus the exact
search spaces the rankings came from.  Try the catalog entries in rank
order, as far as your budget allows.
"""

from covsearch import builtin_catalog, builtin_models, builtin_space, builtin_task_map
from covsearch.report import render_catalog

print("available (model, method) pairs:")
for model, method in builtin_models():
    space = builtin_space(model, method)
    print(f"  {model} / {method}: grid of {space.size} configurations")
print()

entries = [e for e in builtin_catalog() if e.source == "cbs_recommendation"]
print(render_catalog(entries))

# The spaces behind the rankings, e.g. for LoRA tuning of Llama-3-8B.
space = builtin_space("Llama-3-8B", "lora")
for hp in space.hyperparameters:
    print(f"{hp.name} ({hp.kind}): {list(hp.domain)}")
print()

# Baseline defaults from public sources; note some of their values sit
# outside the searched domains above.
defaults = [e for e in builtin_catalog() if e.source == "default_baseline"]
print(render_catalog(defaults))

# The dataset-to-task grouping used by macro-averaged comparison reports.
groups = builtin_task_map()
tasks = sorted(set(groups.values()))
for task in tasks:
    members = sorted(d for d, t in groups.items() if t == task)
    print(f"{task}: {', '.join(members)}")
