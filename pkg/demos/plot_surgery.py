"""
Lagrangian surgery
==================

On T*[3] k[x] the fiber is a Lagrangian, but it sits in degree -3, below
the window.  Surgery swaps it for its partner.
"""

from dshift import parse_presentation, shifted_cotangent
from dshift.darboux import symmetric_complex
from dshift.witt import surgery_to_lagrangian

T = shifted_cotangent(parse_presentation("field Q; gen x : 0;"), 3)
sym = symmetric_complex(T.algebra, T.omega, 3, T.derham)
print([(b.name, b.degree) for b in sym.M.basis])

L = surgery_to_lagrangian(sym, ["d(y_x)"])
print("swaps:", L.swaps, "| result:", L.names)
print(L.report.to_dict())
