# %% [markdown]
# # A multi-diagonal operator and its symbol
#
# Build a period-3, five-diagonal operator, look at a finite section, and
# check that the spectrum of long sections sits on the curve where the
# Bloch symbol has unimodular multipliers.

# %%
import numpy as np

from finiteband import ErgodicSystem, build_section, shift_commutation_residual, symbol_matrix
from finiteband.floquet import bands_from_symbol, dos_band_check

rng = np.random.default_rng(1)
q = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
q[0] = q[0].real
q[2] = [1.0, 0.6, 1.4]
sys_ = ErgodicSystem(p=3, d=2, q=q)

# %%
J = build_section(sys_, 0, 9)
print(np.round(J.entries, 2))
print("Hermitian:", J.is_hermitian())
print("J(w)S - S J(Tw) on the interior:", shift_commutation_residual(sys_, 0, 20))

# %% [markdown]
# On the unit circle the symbol is the Bloch matrix, so its eigenvalues
# sweep out the bands as the quasi-momentum goes round.

# %%
thetas = np.linspace(0, 2 * np.pi, 7)
for t in thetas:
    ev = np.linalg.eigvalsh(symbol_matrix(sys_, np.exp(1j * t)))
    print(f"theta={t:5.2f}", np.round(ev, 4))

bands = bands_from_symbol(sys_)
print("bands:", bands.to_json())
print("Hausdorff distance to a 1500 x 1500 section:", dos_band_check(sys_, 1500))
