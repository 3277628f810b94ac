"""Loop partitions and the extended inner product.

The degree-n extended inner product sums, over every set partition of the
n tensor slots, a diagonal integral weighted by the number of cyclic
orders of each block.  Those multiplicities add up to n!, and for kernels
that vanish on all diagonals only the all-singleton partition survives,
collapsing the extended product to the plain symmetric-power one.
"""

import math

import numpy as np

from gwn.extfock import (ext_inner_n, fock_inner_n, is_off_diagonal,
                         iter_loop_partitions, loop_census)
from gwn.measure import AtomicMeasure
from gwn.symtensor import SymTensor, rank_one

# ---------------------------------------------------------------- census
# Every permutation of n slots factors into cycles; forgetting the cyclic
# order inside each cycle leaves a set partition carrying prod (|B|-1)!
# permutations.  Summing that count over all partitions recovers n!.
print("partition census (multiplicities sum to n!):")
for n in (1, 2, 3, 4):
    parts = list(iter_loop_partitions(n))
    print(f"  n={n}: {len(parts):3d} partitions, "
          f"census {loop_census(n):3d} = {n}! = {math.factorial(n)}")

print("\nthe n=3 partitions in detail:")
for part in iter_loop_partitions(3):
    blocks = " ".join("{" + ",".join(map(str, b)) + "}" for b in part.blocks)
    print(f"  multiplicity {part.multiplicity}  blocks {blocks}")

# ------------------------------------------- extended vs plain product
# Two atoms with weights 2 and 0.5.  For rank-one kernels f^(x)n the
# diagonal terms contribute extra positive mass, so the extended product
# dominates the plain one.
mu = AtomicMeasure([2.0, 0.5])
f = np.array([0.6, -0.3])
print("\nrank-one kernels f =", f, "under weights", mu.weights)
for n in (1, 2, 3):
    t = rank_one(f, n)
    plain = fock_inner_n(mu, t, t)
    ext = ext_inner_n(mu, t, t)
    print(f"  degree {n}: plain {plain:+.6f}   extended {ext:+.6f}")

# ------------------------------------------------- off-diagonal collapse
# A degree-2 kernel supported only off the diagonal (zero whenever two
# slots coincide) sees no loop corrections at all.
off = SymTensor(2, 2, np.array([0.0, 0.7, 0.0]))  # only the (0,1) entry
print("\noff-diagonal kernel:", off.values, "is_off_diagonal =",
      is_off_diagonal(off))
print("  plain   ", fock_inner_n(mu, off, off))
print("  extended", ext_inner_n(mu, off, off), "(identical)")

# For a fully general kernel the two differ by exactly the diagonal terms.
g = SymTensor(2, 2, np.array([0.4, 0.7, -0.2]))
print("\ngeneral degree-2 kernel:", g.values)
print("  plain   ", fock_inner_n(mu, g, g))
print("  extended", ext_inner_n(mu, g, g))
diff = ext_inner_n(mu, g, g) - fock_inner_n(mu, g, g)
# the only non-singleton partition of two slots is the pair block, whose
# diagonal integral is sum_i w_i g(i,i)^2
by_hand = float(np.sum(mu.weights * np.array([0.4, -0.2]) ** 2))
print(f"  difference {diff:.6f} = sum_i w_i g(i,i)^2 = {by_hand:.6f}")
