"""Classify a few frequencies at scale n and check the factorisation on a major arc."""
import numpy as np

from ffcircle import ArcScale, ExponentSystem, FieldParams, classify
from ffcircle.arcs import enumerate_centers, sample_beta_in_box, verify_major_arc_identity
from ffcircle.torus import format_tail, parse_tail, random_tail

field = FieldParams(2)
system = ExponentSystem((1,), field)
scale = ArcScale(9, system)
print(f"n=9: centers up to deg h = {scale.max_deg_h}")

rng = np.random.default_rng(1)
for alpha in [parse_tail(field, "t^-1+t^-12", 30), parse_tail(field, "t^-2", 30), random_tail(field, 30, rng)]:
    v = classify([alpha], scale)
    print(f"  {format_tail(alpha)[:40]:40s} -> {'major at ' + str(v.center) if v.major else 'minor'}")

for c in enumerate_centers(1, system):
    beta = sample_beta_in_box(c, scale, rng)
    rep = verify_major_arc_identity(c, beta, scale)
    print(f"center {c}: |M_n(a/h + beta) - Lambda M_n(beta)| = {rep.max_abs_error:.2e}")
