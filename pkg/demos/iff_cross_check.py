"""Compare the F-side certificate with a direct search for a G deflator on
a handful of seeded models."""
import sys

from deflator_lab import (certificate_search, enlarge_progressively, g_deflator_search,
                          mult_decomp, stop_before)
from deflator_lab import generators as gen

count = int(sys.argv[1]) if len(sys.argv) > 1 else 20
agree = 0
for i in range(count):
    F, tau = gen.random_model(f"demo:{i}", gen.Sizes(6, 4))
    pair = enlarge_progressively(F, tau)
    X = gen.random_martingale(f"demo:{i}:X", F)
    cert = certificate_search(pair, pair.bundle, mult_decomp(pair.bundle, pair.vt), pair.vt, X)
    direct = g_deflator_search(pair, stop_before(X, tau))
    agree += cert.feasible == direct.feasible
    print(f"model {i:3d}: n={F.n} T={F.T} certificate={cert.feasible!s:5} direct={direct.feasible}")
print(f"{agree}/{count} verdicts agree")
