# %% [markdown]
# # Generating Morse frames
#
# Every sample is one character rendered into a fixed-length frame: marks for
# dots and dashes, zeros for the gaps between them, then Gaussian noise.
# This walk-through builds a single frame by hand and then a whole dataset.

# %%
import numpy as np

from morse_datasets import codebook, generator as gen

# %% [markdown]
# The codebook holds 64 characters.  `+` is a good running example because
# it alternates dots and dashes.

# %%
plus = codebook.codeword_of("+")
print(plus.label, plus.code, plus.index)

# %% [markdown]
# Each variant is a config.  Family 1 is the baseline; the second number is
# the noise standard deviation in raw intensity units.

# %%
cfg = gen.variant_config(1, 0, master_seed=7)
rng = gen.sample_stream(cfg, plus.index, 0)
layout = gen.partition_frame(plus, cfg, rng)
for kind, length in layout.runs:
    print(f"{kind.name:<10}{length}")

# %%
frame = gen.render_intensity(layout, cfg, rng)
print(np.round(frame[:24], 2))

# %% [markdown]
# Noise is added and clipped to the intensity range, and the frame is then
# divided by 16 and rounded to thousandths.  The noise-free frame still
# decodes back to its character.

# %%
sample = gen.generate_sample(plus, cfg, gen.sample_stream(cfg, plus.index, 0))
print(gen.decode_codeword(sample.values, cfg).label)

noisy_cfg = gen.variant_config(1, 3, master_seed=7)
noisy = gen.generate_sample(plus, noisy_cfg, gen.sample_stream(noisy_cfg, plus.index, 0))
print(noisy.values[:24])

# %% [markdown]
# Family 3 widens dashes to start at 3, so a dash can look like a dot.

# %%
print(gen.confusion_probability(plus, gen.variant_config(3, 0), exact=True))
print(round(gen.confusion_probability(plus, gen.variant_config(3, 0)), 5))
print(round(gen.confusion_probability(plus, gen.variant_config(4, 0)), 5))

# %% [markdown]
# A whole dataset.  `per_class` is trimmed here; the default is 7000.

# %%
ds = gen.generate_dataset(cfg.replace(per_class=70))
print(ds)
X_train, y_train = ds.split("train")
print(X_train.shape, np.bincount(ds.y[ds.is_test])[:5])
