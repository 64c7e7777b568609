"""How the critical determinant of the p-norm ball moves with p.

Two lattice configurations compete. Below the crossover rho one of them is
smaller, above it the other one takes over. The octagons get exact values in
Q(sqrt 2).
"""
from fractions import Fraction

from normcf import exactnum as en
from normcf.critdet import critical_determinant, delta0, delta1, delta_p, rho
from normcf.norms import INF, parse_norm

print("p       Delta_p          branch")
for p in [1, Fraction(3, 2), 2, Fraction(5, 2), 3, 4, 8, INF]:
    r = delta_p(p)
    print(f"{str(p):7} {r.delta_float():.12f}  {r.branch}")

iv = rho()
print(f"\ncrossover rho lies in [{float(iv.lo):.12f}, {float(iv.hi):.12f}]")
for p in (Fraction(5, 2), Fraction(13, 5)):
    print(f"  p = {p}: Delta0 = {en.to_float(delta0(p)):.10f}, Delta1 = {en.to_float(delta1(p)):.10f}")

for name in ("oct1", "oct2"):
    d = critical_determinant(parse_norm(name))
    print(f"\n{name}: Delta = {en.format_exact(d)} = {en.to_float(d):.12f}")
