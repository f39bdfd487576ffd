"""
Tor amplitude and duality
=========================

The Koszul complex on (x1, x2) has Tor amplitude [-1, 1]; so does its dual.
Random scrambled complexes show the amplitude flipping under duality.
"""

import random
from pathlib import Path

from dshift import parse_presentation
from dshift.corpus import random_perfect_complex
from dshift.dgmod import dual, parse_module, tor_amplitude

plane = parse_presentation("field Q; gen x1 : 0; gen x2 : 0;")
K = parse_module((Path(__file__).parent / "data" / "koszul_plane.mod").read_text(), plane)
print(tor_amplitude(K, random.Random(0)).interval, tor_amplitude(dual(K), random.Random(0)).interval)

rng = random.Random(1)
for _ in range(5):
    M, expected = random_perfect_complex(rng, plane)
    print(expected, tor_amplitude(M, random.Random(0)).interval,
          tor_amplitude(dual(M), random.Random(0)).interval)
