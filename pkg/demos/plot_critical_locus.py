"""
The derived critical locus of x^3/3
===================================

Build the twisted shifted cotangent algebra, check it is 1-shifted
symplectic, then hide it behind a change of coordinates and recover the
potential with the Darboux pipeline.
"""

from dshift import darboux_pipeline, format_presentation, parse_presentation, shifted_cotangent
from dshift import verify_symplectic

B = parse_presentation("field Q; gen x : 0;")

# T*[1] twisted by df: D y_x = x^2
T = shifted_cotangent(B, 1, "1/3*x^3")
print(format_presentation(T.algebra))
print("omega =", T.omega)
print(verify_symplectic(T.algebra, T.omega, 1).to_dict())

# rescale the form; the recovered potential scales with it
r = darboux_pipeline(T.algebra, T.omega * 2, 1, ["x"])
print("f =", r.f)
print("sigma =", r.to_dict()["sigma"])

# a planted instance: random base, random potential, random coordinates
import random
from dshift.corpus import random_darboux_instance

inst = random_darboux_instance(random.Random(0), 2, quadratic_block=True)
print(format_presentation(inst.A))
r = darboux_pipeline(inst.A, inst.omega, 2, inst.lagrangian, max_polydeg=6)
print("planted", inst.planted_f, "| recovered", r.f, "| middle block", r.quadratic)
