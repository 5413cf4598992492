# %% [markdown]
# # Herding in sequential social learning
#
# Agents see a noisy private signal of a binary state, observe the actions of
# everyone before them and act myopically.  With the observation model and
# costs fitted to a lab experiment, the public belief soon reaches a region
# where every agent ignores its own signal: an information cascade.

# %%
import numpy as np

from socialsense.social_learning import FITTED_B, FITTED_COSTS, is_tp2, run_protocol

B, c = np.array(FITTED_B), np.array(FITTED_COSTS)
print("B is TP2:", is_tp2(B))

run = run_protocol(true_state=0, B=B, costs=c, horizon=30, seed=3)
print("cascade starts at agent", run.cascade_time)
for k in range(min(run.cascade_time + 3, 30)):
    print(f"agent {k:2d}  y={run.observations[k]}  a={run.actions[k]}  public belief {np.round(run.public_beliefs[k], 4)}")

# %% [markdown]
# Over many runs the cascade forms early and locks in the wrong action a
# sizeable fraction of the time.

# %%
times, wrong = [], 0
for seed in range(1000):
    r = run_protocol(seed % 2, B, c, 200, seed)
    times.append(r.cascade_time)
    wrong += int(r.actions[-1] != seed % 2)
print(f"median cascade time {np.median(times):.0f}, latest {max(times)}, wrong herds {wrong / 10:.1f}%")
