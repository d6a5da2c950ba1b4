# %% [markdown]
# # Error criteria on the published 2012/2013 tables
#
# The package ships the actual and forecast monthly consumption for 2012 and
# 2013 (2-fold and k-fold models).  Here we score them with every metric.

# %%
from enercast.metrics import compute_report
from enercast.pipeline import fixture_forecast_tables, emit_plot_data, load_fixture_tables

for (year, scheme), pair in load_fixture_tables().items():
    r = compute_report(pair)
    print(f"{year} {scheme:5s}  MSE {r.mse:8.4f}  RMSE(lit.) {r.rmse_paper:6.4f}"
          f"  RMSE {r.rmse_standard:6.4f}  MAE {r.mae:6.4f}  MAPE {r.mape_pct:6.4f}%")

# %% [markdown]
# `rmse_paper` keeps the 1/n factor outside the square root, so it is
# `sqrt(mse / n)`; `rmse_standard` is the usual `sqrt(mse)`.
#
# The same tables as plot-ready CSV:

# %%
actual, two, kf = fixture_forecast_tables(2012)
print(emit_plot_data(actual, (two, kf)))
