"""Monte-Carlo means of delta(alpha; m) for random alpha.

For almost every alpha, the running mean of delta(alpha; m) tends to a
constant that depends only on the norm. A short run already lands near the
closed forms.
"""
from normcf.dynamics import ergodic_constant, simulate

for s, key in (("p:1", 1), ("p:2", 2), ("p:inf", "inf")):
    rep = simulate(s, samples=20, terms=5000, seed=1)
    c = ergodic_constant(key)
    print(f"{s:6} mean {rep.mean_delta:.5f} +- {3 * rep.mean_stderr:.5f}   closed form {c:.6f}")
    top = max(range(len(rep.histogram)), key=lambda i: rep.histogram[i][2])
    lo, hi, mass = rep.histogram[top]
    print(f"       heaviest histogram bin [{lo:.2f}, {hi:.2f}) holds {mass:.1%} of the terms")
