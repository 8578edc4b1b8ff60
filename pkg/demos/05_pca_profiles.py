# %% [markdown]
# # Principal components and regional profiles
#
# The nine poverty factors are z-scored and decomposed. The first two
# components carry most of the variance because the factors share a
# regional signal. PC1 scores are themselves spatially clustered.

# %%
from pathlib import Path

import numpy as np

from regionlab import esda, pca, plotting, regionalize, synth

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

country = synth.thailand_like(seed=3)
z = pca.standardize(country.features)
result = pca.pca(z, names=country.features.names)
print("cumulative variance:", np.round(result.cumulative, 3).tolist())
for name, row in zip(result.names, result.loadings[:, :2]):
    print(f"{name:22s} PC1 {row[0]:+.3f}  PC2 {row[1]:+.3f}")

w = country.weights(5)
print(f"Moran's I of PC1 scores: {esda.global_moran(result.scores[:, 0], w, 999).I:.3f}")

# %% [markdown]
# Region means of the raw factors, min-max scaled per factor, give one
# radar outline per region.

# %%
regions = regionalize.constrained_ward(z, w, 6, country.geometries)
profile = pca.region_profile(country.features, regions.labels)
plotting.biplot(result, OUT / "05_biplot.svg", labels=regions.labels)
plotting.radar(profile, country.features.names, OUT / "05_radar.svg")
print(np.round(profile, 2))
