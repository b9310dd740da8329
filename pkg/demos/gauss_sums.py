"""Exhaustive Gauss-sum tables for K={3} over F_2 and where the maxima sit."""
from ffcircle.expsum import ExponentSystem, fit_gauss_decay_with_constant, gauss_table
from ffcircle.ffpoly import FieldParams

field = FieldParams(2)
system = ExponentSystem((3,), field)

tables = [gauss_table(s, system) for s in range(6)]
for t in tables:
    worst = max(t.rows, key=lambda r: abs(r.value))
    print(f"s={t.s}: {len(t.rows):4d} centers, max |Lambda| = {t.max_abs:.4f} at a={worst.a[0]}, h={worst.h}")

# cubes in F_4^* are all 1, so a=1, h=t^2+t+1 has no cancellation at all
gamma, c = fit_gauss_decay_with_constant(tables)
print(f"fit with a constant: max |Lambda| <= 2^({c:.2f} - {gamma:.2f} s)")
