# %% [markdown]
# # Green's function of the complement of T^-1[-2, 2]
#
# For T(u) = u^3 - 4u the spectrum is three intervals.  G vanishes on
# them, grows like log|u|, and equals -log|b| on every branch.

# %%
import numpy as np

from finiteband import Poly, TModel, greens_function, separation_check
from finiteband.floquet import bands_from_discriminant
from finiteband.green_model import green_grid, harmonicity_ratio

T = Poly([0, -4, 0, 1])
print("E =", bands_from_discriminant(T).to_json())

# %%
for u in (3.0, 1 + 1j, 1e3, 1e6):
    print(u, greens_function(T, u), np.log(abs(u)))

model = TModel(T)
u = 0.4 + 0.8j
for l in range(3):
    p = TModel(T, l).eval(u)
    print(l, -np.log(abs(p.b)), p.w)
print("harmonicity ratio (about 4):", harmonicity_ratio(T, 2 + 1j, 1e-2))

# %% [markdown]
# All three branches above one z share the same w, so (z, w) cannot tell
# them apart.

# %%
print(separation_check(model, 0.7 + 0.3j).to_json())

# %%
re = np.linspace(-3, 3, 301)
im = np.linspace(-1.5, 1.5, 151)
G = green_grid(T, re, im)
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3))
    ax.contour(re, im, G, levels=20)
    ax.set_aspect("equal")
    fig.savefig("green.png", dpi=120)
except ImportError:
    pass
