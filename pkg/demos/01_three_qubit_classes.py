"""Classifying the two genuinely entangled three-qubit classes.

Every state with a qubit third party is read as a pair of n x n matrices
(R0, R1), one per basis state of the qubit. The points where the pencil
a0*R0 + a1*R1 loses rank, together with the Jordan structure there, are
invariant under local invertible operators.

Run with ``python3 demos/01_three_qubit_classes.py``.
"""

# %%
import numpy as np

from subschmidt import analyze, catalog, min_decomposition, relative_decomposition

np.set_printoptions(precision=4, suppress=True)

# %% [markdown]
# GHZ gives a pencil with two distinct rank drops, each carrying a single
# one-by-one block. W gives a single rank drop with a two-by-two block.

# %%
for name in ("ghz", "w"):
    entry = catalog.named(name)
    dec = relative_decomposition(entry.state)
    an = analyze(dec)
    print(f"{name}: family {an.signature}")
    for point, tower in an.eigenvalues:
        print(f"   point {point.coords}, blocks {list(tower.blocks)}, staircase {list(tower.staircase)}")
    print(f"   fewest product terms: {min_decomposition(entry.state).term_count}")

# %% [markdown]
# Scrambling with random local operators moves the rank-drop points around
# the projective line but leaves the family untouched.

# %%
w = catalog.named("w")
for seed in range(5):
    image = catalog.random_in_class(w, seed)
    an = analyze(relative_decomposition(image))
    lam = an.points[0].lam
    print(f"seed {seed}: family {an.signature}, point lambda = {lam:.4f}")
