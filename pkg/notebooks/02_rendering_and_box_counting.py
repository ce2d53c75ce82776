# %% [markdown]
# # Rendering the Cantor circles
#
# The escape-time raster separates the basin of infinity from the rest of
# the plane. Its boundary mask gives a second, much coarser, dimension
# estimate by box counting.

# %%
from __future__ import annotations

import numpy as np

from mcdim import McMullenMap, Window, box_count, render, solve_bowen_extrapolated

# %%
f = McMullenMap(3, 0.005)
r = render(f, Window.figure(600), path="q3_p0.005.ppm")
print("boundary components", r.boundary_components())
print("encloses origin", r.boundary_encloses(0j))
print("escaping components", int(r.component_id.max()))

# %% [markdown]
# Grey pixels belong to escaping components other than the basin of
# infinity; each sits between two of the nested circles of the Julia set.

# %% [markdown]
# ## Box counting against the Bowen estimate

# %%
f = McMullenMap(3, 0.05)
w = Window.figure(2048)
mask = render(f, w).boundary_mask
est = box_count(mask, w)
print("box count", est.D, "scales", est.details["scales"], "counts", est.details["counts"])
print("bowen", solve_bowen_extrapolated(f, 6, 10).D)
print("boundary pixels", int(np.count_nonzero(mask)))
