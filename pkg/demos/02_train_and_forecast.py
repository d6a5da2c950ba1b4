# %% [markdown]
# # Train on a synthetic history and forecast the next year
#
# Real monthly data would come from `read_csv`; a seeded synthetic series
# stands in here.  The last 12 months are held back and used as the
# exogenous scenario (temperature, humidity, population, GDP).

# %%
import numpy as np

from enercast.dataset import Dataset, generate_synthetic, raw_samples
from enercast.metrics import compute_report
from enercast.pipeline import RunConfig, recursive_forecast
from enercast.validation import fit_and_train

data = generate_synthetic(240, seed=7, noise=0.5)
history, scenario = Dataset(data.records[:-12]), Dataset(data.records[-12:])
print(history, scenario)

# %%
cfg = RunConfig(lag_window=12, max_epochs=1000)
raw = raw_samples(history, cfg.lag_window)
net, params, report = fit_and_train(raw, cfg.network_config(raw.n_features), cfg.train_config())
print(f"{report.epochs_run} epochs, stop: {report.stop_reason}, final MSE (scaled) {report.epoch_mse[-1]:.2e}")

# %% [markdown]
# Forecast month by month; each prediction becomes the newest lag input.

# %%
table = recursive_forecast(net, params, history, scenario, horizon=12, lag_window=cfg.lag_window)
for row in table.rows:
    print(f"{row.year}-{row.month:02d}  actual {row.actual:7.2f}  forecast {row.forecast:7.2f}")

actual = np.array([r.actual for r in table.rows])
forecast = np.array([r.forecast for r in table.rows])
print(compute_report(actual, forecast))
