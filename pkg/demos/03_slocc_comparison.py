"""Deciding whether two states are related by local invertible operators.

Two states are compared by matching their pencil invariants, solving for a
Moebius map between their rank-drop points and then building explicit local
operators (A, B, C) that carry one state onto the other. The operators are
checked by applying them.

Run with ``python3 demos/03_slocc_comparison.py``.
"""

# %%
import numpy as np

from subschmidt import catalog, equivalent, fidelity
from subschmidt.tensor_state import apply_local

np.set_printoptions(precision=3, suppress=True)

# %% [markdown]
# A random local image of psi_c3 is recognised, and the returned operators
# map the original onto the image.

# %%
entry = catalog.named("psi_c3")
image = catalog.random_in_class(entry, seed=3)
decision = equivalent(entry.state, image)
print(decision.reason, "| residual", decision.certificate.residual)
A, B, C = decision.certificate.ambient
print("fidelity after applying A, B, C:", fidelity(apply_local(entry.state.amplitudes, A, B, C), image))
print("Moebius parameters:", decision.certificate.moebius)

# %% [markdown]
# Different Jordan families are never equivalent.

# %%
for x, y in [("w", "ghz"), ("psi_d3", "psi_e3"), ("psi_f4", "psi_g4")]:
    d = equivalent(catalog.named(x).state, catalog.named(y).state)
    print(f"{x} vs {y}: {d.equivalent} ({d.reason})")
