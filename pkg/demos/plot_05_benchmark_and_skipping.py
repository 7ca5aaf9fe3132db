"""
Benchmark sweep and stage skipping
==================================

The benchmark draws network parameters per trial, fails one segment of a
random global route and runs every algorithm on the same failed view. The
skip analysis reruns the two-phased algorithm with and without stage
skipping to see whether each skipped stage would have held a path.
"""

import json

from skyway.bench import ExperimentConfig, emit_results, run_experiment, skip_analysis, summarize_metrics

config = ExperimentConfig(trials=20, nodes=(1000, 2000), seed=5)
records = run_experiment(config)
summary = summarize_metrics(records)
for algo, row in summary["algorithms"].items():
    print(f"{algo:16s} overhead {row['mean_distance_overhead']:.4f}  "
          f"node compression {row['mean_node_compression']:.4f}  "
          f"median search {row['search_ns']['median'] / 1e6:.3f} ms  "
          f"fallback {row['fallback_rate']:.2f}")

# CSV rows, one per trial and algorithm.
print(emit_results(records[:4]))

report = skip_analysis(ExperimentConfig(nodes=(1000, 2000), seed=5), scenarios=30)
doc = report.to_dict()
doc.pop("entries")
print(json.dumps(doc, indent=1))
