# %% [markdown]
# # Tweets as a leading indicator
#
# A count series responds to an input series with a delay.  The ARX model
# ``tau_k = sum a_i tau_{k-i} + sum b_i rho_{k-delay-i} + d`` is fitted by
# least squares; the delay is chosen on a holdout window.

# %%
import numpy as np

from socialsense.timeseries import ArxModel, arx_fit, arx_predict, delay_scan, simulate_arx

rng = np.random.default_rng(3)
K = 430
rho = 50 + 30 * np.sin(np.arange(K) * 2 * np.pi / 120) + rng.normal(0, 5, K)
true = ArxModel(0, 2, 18, np.zeros(0), np.array([0.6, 0.3]), 10.0)
tau = simulate_arx(true, rho, noise_std=2.0, rng=rng)

scan = delay_scan(tau, rho, n_a=0, n_b=2, max_delay=25, train_length=200)
print("best delay", scan.best_delay, " holdout RMSE", round(scan.rmse[scan.best_delay], 3))

# %% [markdown]
# Fit on the first 200 steps and predict the remaining 230.

# %%
model = arx_fit(tau[:200], rho[:200], 0, 2, scan.best_delay)
pred = arx_predict(model, tau, rho, start=200)
print("b =", np.round(model.b, 3), " d =", round(model.d, 2))
print("prediction RMSE", round(float(np.sqrt(np.mean((pred - tau[200:]) ** 2))), 3), " noise std 2.0")
