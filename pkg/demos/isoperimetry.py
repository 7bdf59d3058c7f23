"""
Edge isoperimetry of the cube
=============================

Every vertex set A has at least n|A| - |A|log2|A| boundary edges, and
subcubes meet the bound exactly.
"""

from koutcube.hypercube import SubcubeSpec, boundary_size, iso_check, iso_lower_bound, subcube_vertices

print(iso_check(4))
print(iso_check(12, samples=500, seed=1))

n = 8
for d in range(n + 1):
    A = subcube_vertices(SubcubeSpec.from_sets(n, range(d)), n)
    print(f"{d}-subcube: boundary {boundary_size(A, n)}, bound {iso_lower_bound(n, len(A)):.0f}")
