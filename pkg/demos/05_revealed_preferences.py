# %% [markdown]
# # Are these choices consistent with maximising something?
#
# Given prices and chosen bundles, GARP says whether some concave monotone
# utility rationalises the data, and Afriat's inequalities construct one.
# For several agents reacting to a common price, the Nash rationality test
# asks for a concave potential instead.

# %%
import numpy as np

from socialsense.revealed_prefs import (
    ConsumerDataset,
    LogPotentialGame,
    afriat_feasible,
    build_potential,
    build_utility,
    cobb_douglas_dataset,
    garp_check,
    marginal_rate_substitution,
    nash_rationality_test,
    potential_game_dataset,
    predict_response,
)

rng = np.random.default_rng(0)
data = cobb_douglas_dataset(20, 2, rng, alpha=[0.4, 0.6])
print("Cobb-Douglas consumer passes GARP:", garp_check(data).passed)
cert = afriat_feasible(data)
u = build_utility(cert, data)
x = data.responses[0]
print("u at the first choice", round(u(x), 4) + 0.0, "vs a cheaper bundle", round(u(0.9 * x), 4))

# %% [markdown]
# A three-way preference cycle: each bundle was affordable when another was
# chosen.

# %%
cyc = ConsumerDataset([[1, 0.5, 4], [4, 1, 0.5], [0.5, 4, 1]], 2 * np.eye(3))
res = garp_check(cyc)
print("cycle data pass GARP:", res.passed, " violating cycle:", res.cycle)

# %% [markdown]
# Two agents whose joint responses maximise a log potential.  The test
# recovers a potential, predicts responses at a new price and reads off a
# marginal rate of substitution.

# %%
game = LogPotentialGame(np.array([[1.0, 2.0], [2.0, 1.0]]), 0.5)
joint = potential_game_dataset(game, 15, rng)
pc = nash_rationality_test(joint)
print("Nash rational:", pc.feasible)
price, budgets = np.array([1.0, 1.5]), np.array([2.0, 1.0])
pred = predict_response(pc, joint, price, budgets)
print("predicted\n", np.round(pred.responses, 3), "\nequilibrium\n", np.round(game.equilibrium(price, budgets), 3))
V = build_potential(pc, joint)
print("MRS of agent 0 at the first observation:", marginal_rate_substitution(V, joint.responses[:, 0].ravel()).value)

# %% [markdown]
# Budgets pin down each agent's spending, but the reconstructed potential
# only sees the agents through ``p . x^i``, so the split of goods between
# them is weakly identified and the prediction above can land on a
# different vertex of the budget set.
