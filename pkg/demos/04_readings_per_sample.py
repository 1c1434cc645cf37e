# %% [markdown]
# # Fewer readings per sample
#
# Method I with n=4, k=1 evaluated with m = 5, 10, 15, 20 readings per AP.
# Times cover fingerprint construction and classification only, not scanning.

# %%
import numpy as np

from quartileloc import LogNormalParams, MethodConfig, m_sweep, paper_scenario

scenario = paper_scenario()
config = MethodConfig("I", k=1, n_aps=4)
for sigma in (0.0, 3.0):
    print(f"sigma = {sigma} dB")
    for row in m_sweep(scenario, LogNormalParams(shadowing_sigma=sigma), config, seed=0):
        print(f"  m={row.m:>2}  EM={row.mean_error_m:.4f} m  TM={1e3 * row.mean_time_s:.3f} ms")

# %% [markdown]
# Across seeds the error falls as m grows.

# %%
table = np.array([[r.mean_error_m for r in m_sweep(scenario, LogNormalParams(), config, seed=s)] for s in range(10)])
print("median EM per m:", {m: round(float(v), 4) for m, v in zip((5, 10, 15, 20), np.median(table, axis=0))})
