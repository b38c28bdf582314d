# %% [markdown]
# # Monodromy of the covering z = zeta^3 + zeta^-3
#
# Lift small loops around each branch value and read off how the six
# preimages get permuted.

# %%
from finiteband import RationalMap, branching_divisor, genus, hurwitz_equivalent, monodromy

f = RationalMap.laurent(3)
for bp in branching_divisor(f):
    print(bp.value, bp.indices)

# %%
h = monodromy(f, rng=0)
for z, sigma in zip(h.branch_points, h.perms):
    print(f"{z!s:>8}  {sigma}  type {sigma.cycle_type()}")
print("product:", h.product())
print("genus:", genus(h))

# %% [markdown]
# Another base point gives different labels, but the tuples agree after a
# single relabeling of the fiber.

# %%
h2 = monodromy(f, rng=5)
print(h2.basepoint, hurwitz_equivalent(h, h2))
