# %% [markdown]
# # Sweeps and correlations
#
# `run_experiment` loops over variants, size factors, densities and seeds.
# For each combination it generates the data, computes the metrics and trains
# a network.  The `metric_correlation` suite then correlates each metric with
# accuracy.

# %%
from fractions import Fraction

from morse_datasets.experiment import ExperimentSpec, run_experiment

# %%
spec = ExperimentSpec(
    suite="metric_correlation",
    variants=[(f, s) for f in (1, 3) for s in (0, 2, 4)],
    scale=Fraction(1, 140),
    hidden=128,
    epochs=8,
    seeds=[0],
)
report = run_experiment(spec, log=print)

# %%
for row in report["summary"]:
    print(f"{row['variant']}  U={row['U']:.3f}  T={row['T']:>5}  acc={row['test_accuracy']:5.1f}")
print(report["correlation"])

# %% [markdown]
# Every row is a function of the spec alone.  Running it again returns
# exactly the same document, and `cache_dir` lets repeated runs skip
# generation.
