"""Counting the Jordan families available to (n, n, 2) systems.

A family is fixed by how the n generalized eigenvalues group into distinct
points and by the Jordan block sizes at each point. The number of families
grows quickly with n.

Run with ``python3 demos/04_counting_families.py``.
"""

# %%
from subschmidt import catalog, count_families, enumerate_families
from subschmidt.pencil import family_name

# %%
for n in range(2, 8):
    print(f"n = {n}: {count_families(n)} families")

# %% [markdown]
# For n = 4 every family is listed together with the fewest product terms
# any of its states needs.

# %%
for sig in enumerate_families(4):
    print(f"{family_name(sig):>16}  towers {[list(t) for t in sig.towers]}  "
          f"min terms {catalog.expected_min_terms(sig)}")
