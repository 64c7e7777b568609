"""Norm-adapted expansions against a brute-force lattice search.

For each norm, the convergents of the expansion should be exactly the best
approximations found by scanning denominators. The 1-norm case also matches
the threshold test on regular convergents.
"""
from normcf.fcf import lattice_oracle, necessary_condition, s_expand
from normcf.norms import parse_norm
from normcf.regcf import RandomUniform, RegularCF

alpha = RandomUniform(7)
reg = RegularCF(alpha)
print("alpha ~", reg.stream.float_value())
print("regular digits:", reg.digits(16))

for s in ("p:1", "p:2", "p:4", "p:inf", "oct1"):
    F = parse_norm(s)
    qs = s_expand(F, alpha, 12).q()
    oracle = [b.q for b in lattice_oracle(F, alpha, 12, q_cap=10**30)][: len(qs)]
    print(f"{s:6} q = {qs[:9]} ... agrees with lattice search: {qs == oracle}")

cf = s_expand(parse_norm("p:1"), reg, 30)
top = cf.retained[-1]
by_threshold = [n for n in range(top + 1) if necessary_condition(1, reg, n)]
print("\n1-norm retained indices: ", cf.retained)
print("threshold test retained:", by_threshold)
