"""
Checking against brute force
============================

The Hamiltonian is diagonal in the sigma^z basis, so a short periodic
chain can be solved by enumerating all configurations. This gives an
independent value of the groundstate energy per site and shows the
twofold degeneracy inside each phase, and the explosion of degeneracy on
a boundary where one coupling vanishes.
"""

import math

from bondising import ModelParams, evolve
from bondising.imps import random_product_state
from bondising.model import energy_per_site
from bondising.oracle import brute_force_ground

print(" theta      iTEBD E/site        brute force (L=12)   degeneracy")
for k in (1, 3, 5, 7):
    params = ModelParams(k * math.pi / 4)
    state, _ = evolve(random_product_state(k), params, seed=k)
    gm = brute_force_ground(12, params)
    print(f" {k}pi/4   {energy_per_site(state, params):.15f}  {gm.energy_per_site:.15f}"
          f"   {gm.degeneracy}")

print("\nboundary theta = 0 (J' = 0): decoupled dimers")
for length in (4, 8, 12):
    gm = brute_force_ground(length, ModelParams(0.0))
    print(f"  L = {length:2d}: degeneracy {gm.degeneracy} = 2^(L/2)")
