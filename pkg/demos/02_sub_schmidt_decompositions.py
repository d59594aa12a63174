"""Writing states as short sums of product terms.

A state of an (n, n, 2) system splits into two plane states, one for each
of two chosen points of the qubit's projective line. Picking those points
at rank drops of the pencil lowers the Schmidt rank of each plane state, so
the total number of product terms falls below the 2n of two ordinary
Schmidt decompositions.

Run with ``python3 demos/02_sub_schmidt_decompositions.py``.
"""

# %%
import numpy as np

from subschmidt import catalog, enumerate_decompositions, fidelity, min_decomposition, reconstruct

# %%
names = ["psi_a", "psi_b", "psi_c3", "psi_d3", "psi_e3"]
for name in names:
    state = catalog.named(name).state
    dec = min_decomposition(state)
    ranks = [p.schmidt_rank for p in dec.pair]
    print(f"{name}: {dec.term_count} terms (plane-state ranks {ranks}), fidelity {dec.fidelity:.12f}")

# %% [markdown]
# The family (e) state has three rank drops, so any two of them give a
# four-term decomposition. Enumeration lists all of them, cheapest first.

# %%
state = catalog.named("psi_e3").state
for dec in enumerate_decompositions(state):
    labels = ["generic" if p.generic else f"{p.point.lam:.3g}" for p in dec.pair]
    print(f"pair {labels}: {dec.term_count} terms")

# %% [markdown]
# Each term is a weight times three unit vectors; summing them gives the
# state back.

# %%
dec = min_decomposition(catalog.w_state())
for t in dec.terms:
    print(np.round(t.weight, 4), np.round(t.vec_a, 4), np.round(t.vec_b, 4), np.round(t.vec_c, 4))
print("reconstruction fidelity:", fidelity(reconstruct(dec), catalog.w_state()))
