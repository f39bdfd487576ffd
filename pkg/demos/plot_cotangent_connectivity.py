"""
Cotangent complexes and connectivity
====================================

The fat point k[x]/x^2 as a cell attachment, its cotangent complex, and
the connectivity test for the inclusion of k[x].
"""

from dshift import SliceSpec, check_connectivity, cohomology, cotangent_complex, parse_presentation

kx = parse_presentation("field Q; gen x : 0;")
fat = parse_presentation("field Q; gen x : 0; gen xi : -1; D xi = x^2;")

L = cotangent_complex(fat).module
print([(b.name, b.degree) for b in L.basis], L.diff)

# H^0 is spanned by 1 and x
for s in cohomology(fat, SliceSpec((-2, 0), max_weight=4)).slices:
    print(s.degree, s.weight, s.dim, [str(v) for v in s.representatives])

# both conditions hold for d = 1, and the degree -1 pieces match
r = check_connectivity(kx, fat, 1, SliceSpec((-3, 0), max_weight=6))
print(r.to_dict())
