"""Walk through one single-shot conversion between energy-incoherent states.

A two-level system with energy gap 1 sits at inverse temperature ln 3, so
the thermal state is [3/4, 1/4].  We try to turn the excited pure state
into the flat pair and watch where the obstruction appears.
"""

import math
from fractions import Fraction

from thermoconv import (
    Distribution,
    EmbeddingSpec,
    embed,
    min_interconversion_infidelity,
    optimal_majorizing,
    smoothed_target,
    thermo_majorizes,
)

F = Fraction

spec = EmbeddingSpec((3, 1), 4)  # thermal weights 3/4, 1/4
p = Distribution([F(1), F(0)])
q = Distribution([F(1, 2), F(1, 2)])

print("thermal embedding splits level weights", spec.gibbs_numerators,
      "over denominator", spec.common_denominator)
print("embedded input :", embed(p, spec).expand())
print("embedded target:", embed(q, spec).expand())

# The exact relation fails: the pure state cannot reach the flat pair.
print("\nreachable exactly?", thermo_majorizes(p, q, spec))

# The best approximate target, and the infidelity it costs.
value = min_interconversion_infidelity(p, q, spec)
print("optimal infidelity:", float(value))
print("closed form       :", (3 - 2 * math.sqrt(2)) / 6)

witness = optimal_majorizing(embed(p, spec), embed(q, spec))
print("\noptimal majorising vector in the embedded space:")
print("  ", witness.tilde_p.expand())
print("pivot starts:", witness.pivots, " segment ratios:", witness.ratios)

best_q = smoothed_target(p, q, spec)
print("\nclosest admissible target back in the physical space:")
print("  ", [float(x) for x in best_q.entries])
print("it is reachable:", thermo_majorizes(p, best_q, spec))
