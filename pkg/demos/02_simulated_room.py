# %% [markdown]
# # The simulated room
#
# A 3.50 x 3.56 x 2.80 m room split into a 4x4 grid of reference points at
# 0.87 m height, with 8 access points on the walls. Readings follow a
# log-normal shadowing model and are rounded to integer dBm.

# %%
import numpy as np

from quartileloc import GenerationSpec, LogNormalParams, euclidean_distance_3d, fit_quadratic, generate_dataset, paper_scenario
from quartileloc.propagation import distance_matrix

scenario = paper_scenario()
for rp_id, pos in scenario.reference_points[:4]:
    print(rp_id, pos)
for ap_id, pos in scenario.access_points:
    print("AP", ap_id, pos)

# %% [markdown]
# Mean RSSI of 20 readings against distance, with the noise-free model and a
# quadratic fitted to the averages, for RP 1 and RP 2.

# %%
params = LogNormalParams(shadowing_sigma=3.0)
data = generate_dataset(GenerationSpec(scenario, params, m=20, instances_per_rp=1, seed=3))
dist = distance_matrix(scenario, scenario.ap_ids)
for rp in (1, 2):
    means = data[rp - 1][0].readings.mean(axis=0)
    fit = fit_quadratic(zip(dist[rp - 1], means))
    print(f"RP{rp}: quadratic a={fit.a:.2f} b={fit.b:.2f} c={fit.c:.2f}, rms {fit.residual_rms:.2f} dB")
    for d, m in sorted(zip(dist[rp - 1], means)):
        print(f"  d={d:.2f} m  mean={m:6.2f}  model={params.mean_rssi(d):6.2f}  quad={fit(d):6.2f}")

# %%
full = generate_dataset(GenerationSpec(scenario, params, m=20, instances_per_rp=10, seed=1))
print(len(full), "sample matrices of shape", full[0][0].readings.shape)
