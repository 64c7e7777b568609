"""The golden ratio under different norms.

Under the sup norm the expansion of (sqrt5 - 1)/2 drops its first regular
convergent. After that it runs on ones, and delta settles on (5 + sqrt5)/10.
Under the Euclidean norm the regular expansion is already best, and
(sqrt3 - 1)/2 reaches the value 1.
"""
from normcf import exactnum as en
from normcf.exactnum import surd
from normcf.fcf import s_expand
from normcf.norms import parse_norm
from normcf.regcf import Surd
from normcf.spectrum import delta_limsup, delta_seq, min_delta_p

golden = Surd(surd(-1, 1, 5, 2))
F = parse_norm("p:inf")
cf = s_expand(F, golden, 8)
print("sup-norm expansion of the golden ratio:", cf.a0, cf.terms)
print("convergent denominators:", cf.q())
print("singularized regular indices:", cf.singularized)

seq = delta_seq(F, golden, 12)
print("\ndelta(alpha; m):", ", ".join(f"{x:.6f}" for x in seq.floats()))
r = delta_limsup(F, golden)
print("limit:", en.format_exact(r.value), r.status)

print("\nthe golden ratio against the minimum of delta over all alpha:")
for s in ("p:5/2", "p:3", "p:4", "p:inf"):
    v = delta_limsup(parse_norm(s), golden).value
    p = parse_norm(s).p
    print(f"  {s:6} delta = {en.to_float(v):.10f}   min = {en.to_float(min_delta_p(p)):.10f}")

r = delta_limsup(parse_norm("p:2"), Surd(surd(-1, 1, 3, 2)))
print("\nEuclidean norm, alpha = (sqrt3 - 1)/2:", en.format_exact(r.value), r.status)
for mu, nu, val in r.limit_points:
    print(f"  limit point mu = {en.format_exact(mu)}, nu = {en.format_exact(nu)}, delta = {en.format_exact(val)}")
