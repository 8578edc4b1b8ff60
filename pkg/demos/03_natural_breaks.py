# %% [markdown]
# # Fisher-Jenks natural breaks
#
# Choropleth maps need class boundaries. Fisher-Jenks picks the k
# contiguous classes of the sorted values that minimise the total
# within-class sum of squares. The dynamic program here is exact.

# %%
from pathlib import Path

import numpy as np

from regionlab import classify, plotting, synth

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

y = np.array([1, 2, 3, 10, 11, 12], dtype=float)
print(classify.fisher_jenks(y, 2).to_dict())

# %% [markdown]
# The goodness of variance fit (GVF) grows with the number of classes. Five
# classes are the default used for maps.

# %%
scenario = synth.thailand_like(seed=3)
savings = scenario.features.column("yearly_savings")
for k in range(2, 8):
    c = classify.fisher_jenks(savings, k)
    print(f"k={k}  GVF={c.gvf:.3f}  breaks={np.round(c.breaks).astype(int).tolist()}")
plotting.choropleth(scenario.geometries, savings, "yearly savings", OUT / "03_savings.svg")
