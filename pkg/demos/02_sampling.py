# %% [markdown]
# # Estimating sentiment from a sample of users
#
# Each node of a 1000-node configuration-model graph holds a sentiment value
# in {0, 1, 2}.  Better-connected users lean positive, so any estimator that
# over-weights hubs is biased.  We compare three estimators against the
# census.

# %%
import numpy as np

from socialsense.network import Configuration, generate_graph, total_variation
from socialsense.sampling import WalkConfig, census, rds_pmf, social_sample, uniform_sample

graph = generate_graph(Configuration(1000, (0, 0, 0.25, 0.25, 0.25, 0.25)), seed=1)
rng = np.random.default_rng(2)
lean = {2: [0.7, 0.2, 0.1], 3: [0.6, 0.25, 0.15], 4: [0.4, 0.3, 0.3], 5: [0.2, 0.3, 0.5]}
values = np.array([rng.choice(3, p=lean[d]) for d in graph.degrees])

everyone = census(graph, values)
print("census            ", np.round(everyone, 3))

# %% [markdown]
# Uniform sampling within one degree class, social sampling (each
# respondent reports its neighbours, down-weighted by their degree) and a
# respondent-driven random walk reweighted by its stationary distribution.

# %%
est = uniform_sample(graph, values, degree=3, sample_size=1000, seed=0)
print("uniform, degree 3 ", np.round(est.pmf, 3), " TV", round(total_variation(est.pmf, census(graph, values, 3)), 3))
est = social_sample(graph, values, sample_size=1000, seed=0)
print("social            ", np.round(est.pmf, 3), " TV", round(total_variation(est.pmf, everyone), 3))
est = rds_pmf(graph, values, WalkConfig(10_000), seed=0)
print("RDS walk          ", np.round(est.pmf, 3), " TV", round(total_variation(est.pmf, everyone), 3))

# %% [markdown]
# A walk that visits nodes in proportion to degree, left unweighted, would
# overstate value 2:

# %%
deg = graph.degrees.astype(float)
biased = np.bincount(values, weights=deg, minlength=3) / deg.sum()
print("degree-weighted   ", np.round(biased, 3), " TV", round(total_variation(biased, everyone), 3))
