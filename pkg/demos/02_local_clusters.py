# %% [markdown]
# # Local Moran's I and cluster maps
#
# Local Moran's I splits the global statistic into one term per province.
# A conditional permutation test (the province's own value is held fixed
# while its neighbours are reshuffled) flags provinces that sit in a
# significant hot spot (HH), cold spot (LL) or outlier (HL, LH).

# %%
from pathlib import Path

import numpy as np

from regionlab import esda, plotting, synth

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

scenario = synth.thailand_like(seed=3)
w = scenario.weights(5)
income = scenario.features.column("monthly_income")
local = esda.local_moran(income, w, n_perm=999, seed=0, alpha=0.05)

# %% [markdown]
# The mean of the local terms reproduces the global statistic.

# %%
print(f"mean local I = {local.I_i.mean():.6f}, global I = {esda.global_moran(income, w, 1).I:.6f}")
labels, counts = np.unique(local.cluster, return_counts=True)
print(dict(zip(labels.tolist(), counts.tolist())))

# %% [markdown]
# Four panels: the income choropleth, the Moran scatter, the quadrant of
# every province, and the significant clusters only.

# %%
plotting.local_moran_panels(scenario.geometries, income, local, OUT / "02_income_local.svg", name="monthly income")
plotting.cluster_map(scenario.geometries, local.cluster, "income clusters", OUT / "02_income_clusters.svg")
