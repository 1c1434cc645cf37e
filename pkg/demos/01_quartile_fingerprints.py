# %% [markdown]
# # Quartile fingerprints
#
# Two positions can share a median RSSI for an access point while the spread
# of their readings differs. Adding Q1 and Q3 separates them.

# %%
import numpy as np

from quartileloc import SampleMatrix, build_mean_instance, build_quartile_instance, quartiles

near = [-45, -44, -45, -46, -45, -44, -45, -45, -46, -44]
far = [-45, -51, -45, -49, -44, -45, -52, -45, -48, -44]
print("near:", quartiles(near), "mean", np.mean(near))
print("far: ", quartiles(far), "mean", np.mean(far))

# %% [markdown]
# Same Q2, different Q1. A sample matrix holds m readings of n APs; its quartile
# fingerprint has 3n attributes, its mean fingerprint n.

# %%
rng = np.random.default_rng(0)
sample = SampleMatrix(rng.integers(-70, -40, size=(20, 8)), tuple(range(1, 9)))
print(build_quartile_instance(sample).attributes.reshape(8, 3))
print(build_mean_instance(sample).attributes)
