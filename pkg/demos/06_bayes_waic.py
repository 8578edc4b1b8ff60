# %% [markdown]
# # Laplace regression of income on education
#
# Income in province i of region j is modelled as
# alpha_j + beta_j (X_ij - mean_j X) plus Laplace noise with scale sigma_j.
# Four variants differ in how the regions share information:
#
# * diff-slopes: hierarchical intercepts and slopes
# * common-slope: hierarchical intercepts, one shared slope
# * independent: every region on its own
# * pooled: one regression for the whole country
#
# WAIC (lower is better) compares them. The data here are simulated from
# the common-slope model, so the truth is known.

# %%
from pathlib import Path
import warnings

import numpy as np

from regionlab import bayes, plotting, synth

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

truth = synth.RegressionTruth(alpha=np.array([21700.0, 21800, 18300, 18100, 18200, 16900]), beta=1500.0,
                              sigma=1000.0)
data = synth.hierarchical_income_data(6, 12, truth, seed=1)
config = bayes.FitConfig(n_chains=4, n_warmup=2000, n_draws=2000, seed=1)

fits = {}
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    for variant in bayes.ModelVariant:
        fits[variant.value] = bayes.fit(variant, data, config)
        print(f"{variant.value:13s} max R-hat {max(fits[variant.value].rhat.values()):.3f}")

# %% [markdown]
# 95% equal-tailed intervals for the common-slope fit, next to the truth.

# %%
ci = bayes.credible_interval(fits["common-slope"])
for j, a in enumerate(truth.alpha):
    lo, mean, hi = ci[f"alpha[{j}]"]
    print(f"alpha[{j}] true {a:7.0f}  interval ({lo:7.0f}, {hi:7.0f})")
print(f"beta     true {truth.beta:7.0f}  interval ({ci['beta'][0]:7.0f}, {ci['beta'][2]:7.0f})")
plotting.interval_forest(ci, OUT / "06_intervals.svg")
plotting.fitted_lines(data, fits["common-slope"], OUT / "06_fits.svg")

# %%
waic = {name: bayes.waic(f) for name, f in fits.items()}
for name, r in waic.items():
    print(f"{name:13s} WAIC {r.waic:9.1f}  (p_waic {r.p_waic:5.1f}, se {r.se:5.1f})")
plotting.waic_bars({k: v.waic for k, v in waic.items()}, OUT / "06_waic.svg",
                   errors={k: v.se for k, v in waic.items()})
