"""A text picture of the natural-extension domain, with its measures.

Letters: O for Omega, S for the singularization area, ' and " for its images,
. for boundary points. D reaches 1/Delta on the closure of Omega.
"""
import numpy as np

from normcf import exactnum as en
from normcf.critdet import critical_determinant
from normcf.dynamics import RegionLabel, label_grid, measure_S, omega_S1, sup_D_search
from normcf.norms import parse_norm

GLYPH = {RegionLabel.Omega: "O", RegionLabel.S: "S", RegionLabel.Sprime: "'",
         RegionLabel.Sdoubleprime: '"', RegionLabel.BoundarySet: ".", RegionLabel.ASet: "a"}
labels = list(RegionLabel)

for s in ("p:1", "p:2", "oct1"):
    F = parse_norm(s)
    n = 32
    U, V, codes = label_grid(F, n)
    grid = np.asarray(codes).reshape(n, n)  # rows follow u, columns follow v
    print(f"\n{s}: u runs left to right over (-1, 1), v runs bottom to top over [0, 1]")
    for j in reversed(range(0, n, 2)):
        print("  " + "".join(GLYPH[labels[grid[i, j]]] for i in range(n)))
    m = measure_S(F)
    sup = sup_D_search(F)
    D = en.to_float(critical_determinant(F))
    print(f"  mass of S in [{m.lo:.6f}, {m.hi:.6f}]; sup D = {sup.value:.6f}; sup D * Delta = {sup.value * D:.6f}")

print(f"\nclosed form for the 1-norm mass: {omega_S1():.10f}")
