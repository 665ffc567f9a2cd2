"""Walk through the algebra the whole scheme rests on.

A scaled integer lattice nested inside q times itself has exactly q^N
codewords in the coarse Voronoi region, and those codewords add like
vectors over GF(q).  This script shows the codebook for small parameters,
checks the addition isomorphism on a few points, and demonstrates that a
two-term sum is recoverable from its mod-coarse residue plus one wrap bit
per coordinate.

Run: python demos/01_field_and_lattice_basics.py
"""

import numpy as np

from relaysec import (
    ExtField,
    NestedLatticePair,
    codebook_point,
    coords_to_field,
    decode_fine_mod_coarse,
    lattice_add,
    mod_coarse,
    reconstruct_sum,
    represent_sum,
)
from relaysec.lattice import enumerate_coords

print("=== extension field GF(3^2) ===")
gf9 = ExtField(3, 2)
print(f"modulus (lowest degree first): {gf9.modulus}")
x = gf9.x()
print(f"x * x = {(x * x).coeffs}   (the modulus folds x^2 back to 2)")
print(f"x^{gf9.order - 1} = {(x ** (gf9.order - 1)).coeffs}   (multiplicative order divides q^r - 1)")

print()
print("=== nested lattice codebook, q = 3, N = 2 ===")
pair = NestedLatticePair(N=2, q=3)
print("coords -> transmitted point (coarse region is [-1.5, 1.5)^2):")
for c in enumerate_coords(pair):
    print(f"  {tuple(int(v) for v in c)} -> {codebook_point(pair, c)}")

print()
print("addition of points matches addition of their GF(3)^2 images:")
a, b = np.array([2, 1]), np.array([2, 2])
geometric = mod_coarse(pair, codebook_point(pair, a) + codebook_point(pair, b))
decoded = decode_fine_mod_coarse(pair, geometric)
print(f"  point({tuple(a)}) + point({tuple(b)}) mod coarse -> coords {tuple(int(v) for v in decoded)}")
print(f"  field images: {coords_to_field(pair, a)} + {coords_to_field(pair, b)} "
      f"= {coords_to_field(pair, lattice_add(pair, a, b))} (mod 3)")

print()
print("=== sum representation: residue + wrap id ===")
p5 = NestedLatticePair(N=1, q=5)
u1 = u2 = np.array([2.0])
rep = represent_sum(p5, u1, u2)
print(f"u1 = u2 = 2.0; mod-coarse residue {rep.sum_mod[0]}, wrap id T = {rep.T}")
print(f"reconstructed sum: {reconstruct_sum(p5, rep)[0]}  (= 4.0 exactly)")

wraps = sum(
    represent_sum(p5, np.array([a]), np.array([b])).T > 1
    for a in (-2.0, -1.0, 0.0, 1.0, 2.0)
    for b in (-2.0, -1.0, 0.0, 1.0, 2.0)
)
print(f"{wraps} of 25 codeword pairs wrap around the coarse cell")
