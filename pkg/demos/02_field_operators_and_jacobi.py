"""Ladder operators of the Gamma field and their tridiagonal structure.

The field at a test function xi acts on symmetric kernels as a sum of
five ladder terms: creation, twice the neutral operator, a scalar, and
two annihilation parts.  Creation is adjoint to the sum of the two
annihilations under the extended inner product, different smearings
commute, and on powers of a single indicator the action is tridiagonal
with explicit coefficients.
"""

import math

import numpy as np
from scipy.special import poch

from gwn.extfock import ext_inner
from gwn.fieldops import (annihilate1, annihilate2, create, gamma_field,
                          jacobi_action_check, jacobi_coefficients)
from gwn.measure import AtomicMeasure
from gwn.symtensor import FockVector, SymTensor, rank_one

rng = np.random.default_rng(7)
mu = AtomicMeasure([1.2, 0.6, 2.0])
m = mu.m

# ------------------------------------------------------------ adjointness
def random_vector(top):
    ks = []
    for n in range(top + 1):
        size = math.comb(m + n - 1, n)
        ks.append(SymTensor(m, n, rng.uniform(-1.0, 1.0, size)))
    return FockVector(ks)

F = random_vector(2)
G = random_vector(3)
xi = np.array([0.5, -0.8, 0.3])
lhs = ext_inner(mu, create(xi, F), G)
rhs = ext_inner(mu, F, annihilate1(xi, G, mu) + annihilate2(xi, G))
print("adjointness under the extended product:")
print(f"  <a+ F, G> = {lhs:+.12f}")
print(f"  <F, a- G> = {rhs:+.12f}   gap {abs(lhs - rhs):.2e}")

# ---------------------------------------------------------- commutativity
xi2 = np.array([-0.2, 0.9, 0.4])
ab = gamma_field(xi, gamma_field(xi2, F, mu), mu)
ba = gamma_field(xi2, gamma_field(xi, F, mu), mu)
print("\nsmeared fields commute:")
print(f"  max kernel entry of [a(xi1), a(xi2)] F: {(ab - ba).max_abs():.2e}")

# ------------------------------------------------------ tridiagonal action
# On powers chi^(x)n of an indicator with total mass sigma the field sends
# degree n to a combination of degrees n-1, n, n+1 only:
#   a(chi) chi^n = chi^(n+1) + (2n + sigma) chi^n + n(n-1+sigma) chi^(n-1)
sigma = 1.0
jc = jacobi_coefficients(sigma, 5)
print(f"\nthree-term coefficients at sigma = {sigma}:")
print("  n      alpha_n    beta_n   c_n")
for n in range(6):
    print(f"  {n}   {jc.alphas[n]:8.4f}  {jc.betas[n]:8.4f}  {jc.norms[n]:8.4f}")

rep = jacobi_action_check(AtomicMeasure([sigma]), [1.0], 6)
print(f"  worst action deviation (n <= 6): {rep.max_action_dev:.2e}")
print(f"  worst norm deviation:            {rep.max_norm_dev:.2e}")

# The squared norms c_n^2 are rising factorials n! sigma(sigma+1)...:
print("\nnorms match n! (sigma)_n:")
for n in range(4):
    print(f"  c_{n}^2 = {jc.norms[n] ** 2:10.4f}   "
          f"n! (sigma)_n = {math.factorial(n) * poch(sigma, n):10.4f}")

# A block of several atoms behaves like one cell with the block's mass.
rep2 = jacobi_action_check(AtomicMeasure([0.7, 0.8, 1.0]), [1.0, 1.0, 0.0], 5)
print("\ntwo-atom block of mass 1.5: worst action deviation",
      f"{rep2.max_action_dev:.2e}")
