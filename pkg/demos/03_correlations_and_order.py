"""
Correlations and order parameters of the four phases
====================================================

The groundstates are classical patterns. The spin correlation
``<sigma^z_0 sigma^z_r>`` reveals the pattern and is the same for both
degenerate states, while the four-site order parameters flip sign
between them.
"""

import math

from bondising import ModelParams, evolve, order_parameters
from bondising.fidelity import fidelity_per_site, trial_seed
from bondising.imps import SIGMA_Z, correlation, random_product_state


def two_groundstates(theta, max_trials=40):
    params = ModelParams(theta)
    found = []
    for n in range(max_trials):
        seed = trial_seed(0, n)
        state, _ = evolve(random_product_state(seed), params, seed=seed)
        if all(fidelity_per_site(state, f) < 0.5 for f in found):
            found.append(state)
        if len(found) == 2:
            break
    return found


for k in (1, 3, 5, 7):
    theta = k * math.pi / 4
    states = two_groundstates(theta)
    print(f"theta = {k}pi/4   phase {ModelParams(theta).phase}")
    for i, psi in enumerate(states):
        corr = [round(correlation(psi, SIGMA_Z, 0, r)) for r in range(9)]
        op = order_parameters(psi)
        vals = ", ".join(f"{v:+.0f}" for v in op.values())
        print(f"  state {i}: O(r) = {corr}   (m_afm, m_fm, m_even_pair, m_odd_pair) = ({vals})")
