# %% [markdown]
# # Training a sparse perceptron
#
# The classifier is a one-hidden-layer perceptron trained with Adam.  Sparsity
# is fixed before training: a random mask removes a share of the weights and
# those weights stay at zero.

# %%
from fractions import Fraction

import numpy as np

from morse_datasets import generator as gen
from morse_datasets.mlp import MlpConfig, init_network, train

# %%
ds = gen.generate_dataset(gen.variant_config(1, 0, Fraction(1, 70), master_seed=0))
print(ds)

# %% [markdown]
# A smaller hidden layer and fewer epochs than the defaults keep this quick.

# %%
results = {}
for density in (1.0, 0.5, 0.25, 0.125):
    cfg = MlpConfig(layer_sizes=(64, 256, 64), density=density, epochs=15, init_seed=0, shuffle_seed=0)
    net = init_network(cfg)
    report = train(net, ds, cfg)
    results[density] = report
    print(f"density {density:<6} weights {net.n_weights:>6}  test {report.test_accuracy:5.1f}%  "
          f"gap {report.generalization_gap:5.1f}")

# %% [markdown]
# Masked weights never move away from zero:

# %%
print(all(np.all(w[m == 0] == 0) for w, m in zip(net.weights, net.masks)))

# %% [markdown]
# The loss curve of the dense run:

# %%
print(np.round(results[1.0].epoch_loss, 3))
