"""
Monte-Carlo comparison
======================

Run with ``python demos/03_monte_carlo_comparison.py [output_dir]``.

Compares the four distributions on one random 200 x 20 system. Each method
gets 200 independent trials of 300 steps from x0 = 0. The same run is
available from the shell as::

    kaczmarz-opt run --m 200 --n 20 --trials 200 --steps 300 --seed 0 --out results
"""

# %%
import sys

from kaczopt import ExperimentConfig, emit_csv, run_experiment
from kaczopt.experiment import ordering_report, summary_text

config = ExperimentConfig(m=200, n=20, trials=200, steps=300, seed=0)
result = run_experiment(config)

# %%
# Mean squared error every 50 steps.
names = list(result.curves)
print("step  " + "  ".join(f"{n:>10}" for n in names))
for k in range(0, config.steps + 1, 50):
    print(f"{k:>4}  " + "  ".join(f"{result.curves[n].mean[k]:>10.3e}" for n in names))

# %%
# Differences within three standard errors are reported as ties.
for better, worse, diff, band, verdict in ordering_report(result):
    print(f"{better} {verdict} {worse}   diff {diff:.2e}   band {band:.2e}")

# %%
if len(sys.argv) > 1:
    paths = emit_csv(result, sys.argv[1])
    print("wrote", ", ".join(str(p) for p in paths.values()))
else:
    print(summary_text(result))
