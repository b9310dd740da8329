"""Small Weyl sums force good rational approximations."""
from ffcircle import FieldParams
from ffcircle.inverse import approx_need, verify_weyl_inverse
from ffcircle.torus import parse_tail

field = FieldParams(2)
alpha = parse_tail(field, "t^-1+t^-3+t^-9", 20)
for rn in (4, 8, 12):
    need, w = approx_need(alpha, rn)
    print(f"rn={rn}: need {need} with g={w.g}, a={w.a}, ord gap {w.ord_gap}")

rep = verify_weyl_inverse((3,), field, 10, trials=60, seed=3)
print(f"K={{3}}, n=10: {len(rep.samples)} samples, need <= {rep.C_hat:.2f} eta + {rep.D_cover:.2f}")
