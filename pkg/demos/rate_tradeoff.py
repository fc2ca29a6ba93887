"""Exact many-copy conversion rates against their second-order estimate.

The benchmark instance: p = [0.7, 0.3] into q = [0.8, 0.2] on a two-level
system with gap 1 at temperature 3.  The exact optimal rate at error
budget 0.05 is compared with the first-order limit and the refined
estimate R1 + c/sqrt(n); the rounded estimate lands within one copy of
the exact answer at every sampled n.
"""

from fractions import Fraction

from thermoconv import (
    Distribution,
    EmbeddingSpec,
    ThermalSystem,
    gibbs_state,
    optimal_rate,
    rate_expansion,
)
from thermoconv.distributions import FLOAT

F = Fraction

system = ThermalSystem(energies=(0, 1), beta=F(1, 3))
spec = EmbeddingSpec.from_system(system)
p = Distribution([F(7, 10), F(3, 10)])
q = Distribution([F(4, 5), F(1, 5)])
gamma = gibbs_state(system, mode=FLOAT)

expansion = rate_expansion(p.to_float(), q.to_float(), gamma, 0.05)
print("regime:", expansion.regime.value)
print("first-order rate  R1 =", expansion.first_order)
print("second-order coefficient =", expansion.second_order_coefficient)
print("irreversibility  nu =", expansion.nu)
print()
print(f"{'n':>4} {'exact m':>8} {'R_exact':>10} {'R1 + c/sqrt(n)':>15} {'off by':>7}")
for n in range(20, 201, 20):
    exact = optimal_rate(p, q, system, spec, n, F(1, 20))
    estimate = expansion.evaluate(n)
    off = int(exact * n) - round(n * estimate)
    print(f"{n:>4} {int(exact * n):>8} {float(exact):>10.6f} {estimate:>15.6f} {off:>7}")

print()
print("the gap R_exact - R1 shrinks like 1/sqrt(n); the estimate closes")
print("most of it, leaving at most one copy of slack at this scale")
