"""
Convergence rates of randomized Kaczmarz
========================================

Run with ``python demos/01_rates_and_bounds.py``.

A random consistent system is solved by projecting onto one equation at a
time. The row distribution ``p`` fixes two contraction factors, omega1 and
omega2, and the expected squared error is squeezed between their powers.
"""

# %%
import numpy as np

from kaczopt import (
    classical_rate,
    envelope,
    generate_system,
    kappa,
    make_rng,
    rate_pair,
    row_norm_distribution,
    row_normalize,
)
from kaczopt.kaczmarz import run_batch
from kaczopt.sampling import RowSampler

A, x, b = generate_system(60, 6, make_rng(1))
B = row_normalize(A).B

# %%
# With rows drawn proportionally to their squared norms, the upper factor
# equals the classical rate 1 - kappa^-2.
p_rka = row_norm_distribution(A)
r = rate_pair(B, p_rka)
print(f"kappa            = {kappa(A):.4f}")
print(f"1 - kappa^-2     = {classical_rate(A):.10f}")
print(f"omega1 (row-norm) = {r.omega1:.10f}")
print(f"omega2 (row-norm) = {r.omega2:.10f}")

# %%
# Uniform sampling gives a different pair of factors for the same system.
r_uni = rate_pair(B, np.full(60, 1 / 60))
print(f"omega1 (uniform)  = {r_uni.omega1:.10f}")

# %%
# Simulate 4000 trajectories in one batch and compare the mean squared error
# to the envelope.
trials, steps = 4000, 80
rows = RowSampler(p_rka, seed=3).draw(trials * steps).reshape(trials, steps)
errs, _ = run_batch(A, b, rows, truth=x)
mean = errs.mean(axis=0)
lo, hi = envelope(float(x @ x), r, np.arange(steps + 1))

print("step   lower        mean         upper")
for k in range(0, steps + 1, 10):
    print(f"{k:>4}   {lo[k]:.4e}   {mean[k]:.4e}   {hi[k]:.4e}")
