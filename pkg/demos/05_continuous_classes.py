"""A family with infinitely many classes.

Once a family has four or more distinct rank-drop points, a Moebius map can
no longer match them freely: the cross-ratio of the points becomes a
continuous label. The one-parameter states psi_h4(a) illustrate this. Their
rank-drop points are 0, infinity, -1/a and -a, whose cross-ratio is 1/a**2.

Run with ``python3 demos/05_continuous_classes.py``.
"""

# %%
import numpy as np

from subschmidt import catalog, equivalent

base = catalog.named("psi_h4", 2)

# %% [markdown]
# Parameters whose 1/a**2 falls in the same six-element cross-ratio orbit as
# 1/4 give equivalent states; anything else does not.

# %%
lam = 0.25
orbit = [lam, 1 / lam, 1 - lam, 1 / (1 - lam), lam / (lam - 1), (lam - 1) / lam]
partners = [np.sqrt(1 / complex(x)) for x in orbit] + [3, 1j, 0.7 + 0.2j]
for a in partners:
    d = equivalent(base.state, catalog.named("psi_h4", a).state)
    print(f"a = {complex(a):.4f}: {d.equivalent} ({d.reason})")
