# %% [markdown]
# # Discriminant, bands and Floquet multipliers
#
# For a periodic Jacobi matrix the discriminant is a polynomial and the
# spectrum is where it lies in [-2, 2].  Inside a band the multipliers sit
# on the unit circle; in a gap they split off.

# %%
import numpy as np

from finiteband import PeriodicJacobi, discriminant, floquet_multipliers
from finiteband.floquet import bands_from_discriminant, dos_band_check

J0 = PeriodicJacobi(a=[1.0, 2.0, 0.5], b=[0.3, -1.0, 0.7])
delta = discriminant(J0)
print("Delta =", delta)
bands = bands_from_discriminant(delta)
print("bands:", bands.to_json())
print("gaps:", bands.gaps())

# %%
zs = np.linspace(bands.intervals[0][0] - 0.5, bands.intervals[-1][1] + 0.5, 13)
sys_ = J0.to_system()
for z in zs:
    beta = floquet_multipliers(sys_, z)
    tag = "band" if bands.contains(z) else "gap "
    print(f"z={z:7.3f} {tag} |beta|={np.round(np.sort(np.abs(beta)), 4)}  Delta={delta(z).real:8.3f}")

# %% [markdown]
# Truncated sections approximate the bands, but cutting the lattice can
# leave a boundary eigenvalue stranded in a gap (at most one per gap).  Such
# a stray eigenvalue dominates the Hausdorff distance, so it jumps with N.

# %%
from finiteband.ergodic_operator import build_section

for N in (200, 800, 1500, 2000):
    ev = np.linalg.eigvalsh(build_section(sys_, 0, N).entries)
    stray = [round(float(x), 4) for x in ev if bands.distance(x) > 0.05]
    print(f"N={N:5d} hausdorff={dos_band_check(J0, N):.4f} gap eigenvalues={stray}")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    x = np.linspace(zs[0], zs[-1], 800)
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(x, delta(x).real)
    ax.axhspan(-2, 2, color="0.9")
    for l, r in bands:
        ax.axvspan(l, r, color="C1", alpha=0.2)
    ax.set_ylim(-6, 6)
    ax.set_xlabel("z")
    ax.set_ylabel("Delta(z)")
    fig.tight_layout()
    fig.savefig("bands.png", dpi=120)
