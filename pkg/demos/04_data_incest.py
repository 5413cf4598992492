# %% [markdown]
# # Removing data incest from a reputation network
#
# Nodes of an information-flow DAG are (agent, time) pairs.  When a node's
# information reaches a later node along two paths, naive fusion counts it
# twice.  The fair rating weights each predecessor's log-belief by the
# solution of a triangular system built from the transitive closure.

# %%
import itertools

import numpy as np

from socialsense.incest import achievable, double_path_example, incest_weights, neighbor_sets, propagate, seven_node_example
from socialsense.social_learning import FITTED_B, FITTED_COSTS

B, c = np.array(FITTED_B), np.array(FITTED_COSTS)
dag = seven_node_example()
H, F = neighbor_sets(dag, 6)
print("node 6 hears from", H.tolist(), "and is reached by", F.tolist())
print("weights", incest_weights(dag, 6).tolist(), "achievable:", achievable(dag, 6)[0])

# %% [markdown]
# Without the direct edge 0 -> 6 node 6 would need node 0's belief to cancel
# the double count, which it never sees.  Naive fusion is then biased:

# %%
double = double_path_example()
print("double path achievable at node 6:", achievable(double, 6))
worst = 0.0
for ys in itertools.product(range(2), repeat=7):
    fair = propagate(double, B, c, ys, "fair", require_achievable=False)
    naive = propagate(double, B, c, ys, "naive")
    worst = max(worst, abs(fair.prior_beliefs[6, 0] - naive.prior_beliefs[6, 0]))
print(f"largest gap between administrator-fair and naive beliefs at node 6: {worst:.3f}")
