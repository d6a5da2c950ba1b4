# %% [markdown]
# # 2-fold and 10-fold cross validation
#
# Chronological folds are contiguous blocks of months.  Each fold fits its
# own scaling on the training months only, trains a fresh network and is
# scored in GWh.

# %%
from enercast.dataset import generate_synthetic, raw_samples
from enercast.network import NetworkConfig, TrainConfig
from enercast.validation import cross_validate, make_folds

plan = make_folds(12, 3, mode="chronological")
print([list(f) for f in plan.folds])

# %%
raw = raw_samples(generate_synthetic(240, seed=7, noise=0.0), 12)
net_cfg = NetworkConfig((raw.n_features, 10, 1))
tc = TrainConfig(learning_rate=0.05, max_epochs=500)

for k in (2, 10):
    cv = cross_validate(raw, k, seed=0, mode="chronological", net_cfg=net_cfg, train_cfg=tc)
    print(f"--- {k}-fold")
    print(cv.to_csv())
