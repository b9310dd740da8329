"""Polynomial averages on F_2[t]/h settle once n reaches deg h."""
import numpy as np

from ffcircle import FieldParams, build_translation_system, convergence_probe, parse_poly

field = FieldParams(2)
rng = np.random.default_rng(0)

for modulus, K in [("t^3+t+1", (1,)), ("t^3+t+1", (3,)), ("t^2+t+1", (3,))]:
    X = build_translation_system(parse_poly(field, modulus))
    g = rng.integers(0, 5, size=X.size)
    trace = convergence_probe(X, g, K, 6)
    print(f"h={modulus}, K={K}: stable from n={trace.stabilization}, limit {np.round(np.real(trace.limit), 3)}")
