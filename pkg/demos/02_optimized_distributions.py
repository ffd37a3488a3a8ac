"""
Optimized row distributions
===========================

Run with ``python demos/02_optimized_distributions.py``.

Three ways to choose ``p``: maximize the smallest eigenvalue of
``B' diag(p) B`` (maximin), maximize its smallest diagonal entry (LP
relaxation), or run a few multiplicative D-optimal updates.
"""

# %%
import numpy as np

from kaczopt import (
    generate_system,
    kappa,
    kappa_optimal_rescaling,
    make_rng,
    optimize_dopt,
    optimize_lp,
    optimize_maximin,
    q_from_p,
    rate_pair,
    row_norm_distribution,
    row_normalize,
    weighted_gram,
)

A, _, _ = generate_system(80, 8, make_rng(2))
B = row_normalize(A).B

# %%
# The maximin solver stops when its certificate proves the value is within
# tol of optimal. The certificate is a trace-one PSD matrix W; no
# distribution can push lambda_min above max_i b_i'Wb_i.
orka = optimize_maximin(B)
print(f"maximin t_hat        = {orka.t_hat:.8f}")
print(f"certified upper bound = {orka.upper_bound:.8f}")
print(f"iterations            = {orka.iterations}")
print(f"rows with p < 1e-5    = {orka.zero_count} of {B.shape[0]}")

# %%
# The LP relaxation value is an upper bound on the maximin value; its
# distribution is a feasible but weaker choice.
lp = optimize_lp(B)
print(f"LP value               = {lp.t_hat:.8f}")
print(f"lambda_min at LP point = {lp.history['lambda_min']:.8f}")

# %%
# Ten D-optimal updates from the row-norm distribution. log det never drops.
dopt = optimize_dopt(row_norm_distribution(A), B, iters=10)
print("log det per iteration:", np.round(dopt.history["logdet"], 4))

# %%
for name, p in [("row-norm", row_norm_distribution(A)), ("maximin", orka.p_hat),
                ("lp", lp.p_hat), ("d-opt", dopt.p_hat)]:
    print(f"{name:<9} omega1 = {rate_pair(B, p).omega1:.6f}")

# %%
# Dividing p_hat by t_hat gives a design q with B' diag(q) B >= I, and
# scaling row i by sqrt(p_hat[i]) gives the best-conditioned row scaling.
q = q_from_p(orka.p_hat, orka.t_hat)
print(f"lambda_min(B' diag(q) B) = {np.linalg.eigvalsh(weighted_gram(B, q))[0]:.8f}")
print(f"kappa(A)                 = {kappa(A):.4f}")
print(f"kappa(rescaled)          = {kappa(kappa_optimal_rescaling(B, orka)):.4f}")
print(f"1 / sqrt(t_hat)          = {1 / np.sqrt(orka.t_hat):.4f}")
