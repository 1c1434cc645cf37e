# %% [markdown]
# # Comparing the four methods over the (n, k) grid
#
# Methods I and II use quartile fingerprints with Euclidean kNN; I takes the
# majority reference point, II the frequency-weighted centroid. The PS baseline
# uses powed mean fingerprints with the Sorensen distance, 3-PCA projects mean
# fingerprints on three principal components.

# %%
from quartileloc import GenerationSpec, LogNormalParams, error_cdf, generate_dataset, paper_scenario, treatment_grid
from quartileloc.evaluation import summary_table

scenario = paper_scenario()
params = LogNormalParams(shadowing_sigma=3.0)
train = generate_dataset(GenerationSpec(scenario, params, 20, 10, seed=1))
test = generate_dataset(GenerationSpec(scenario, params, 20, 10, seed=2))

grids = {}
for method in ("I", "II", "PS", "3PCA"):
    grids[method] = treatment_grid(train, test, scenario, method)
    print(f"\nmethod {method}: {len(grids[method])} treatments")
    print(summary_table(grids[method]))

# %% [markdown]
# CDF over the treatment mean errors: share of treatments below 0.12 m.

# %%
for method, results in grids.items():
    cdf = error_cdf(r.mean_error_m for r in results)
    below = max((f for t, f in cdf if t < 0.12), default=0.0)
    print(f"{method:>4}: {100 * below:6.2f}% of treatments under 0.12 m, max EM {cdf[-1][0]:.4f} m")

# %% [markdown]
# The smallest (n, k) with zero mean error, if any.

# %%
for method, results in grids.items():
    zero = [r for r in results if r.mean_error_m == 0.0]
    best = min(zero, key=lambda r: (r.n_aps, r.k), default=None)
    print(method, (best.n_aps, best.k) if best else "none")
