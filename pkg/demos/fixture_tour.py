"""Walk through the three-outcome fixture: Azema supermartingale, vanishing
times, the multiplicative decomposition and a deflator before tau."""
from deflator_lab import (arbitrage_witness, certificate_search, deflator_dfet,
                          enlarge_progressively, eta_martingales, fixture_m2, mult_decomp)
from deflator_lab.io import time_to_json
from deflator_lab.space import constant


def show(name, X):
    print(f"{name:>8}: " + " | ".join(" ".join(f"{str(v):>4}" for v in row) for row in X))


F, tau = fixture_m2()
pair = enlarge_progressively(F, tau)
b, vt = pair.bundle, pair.vt
print("outcomes", F.outcomes, "tau", time_to_json(tau))
for name in ("Z", "Ztilde", "a", "mdot"):
    show(name, b.processes()[name])
print({k: time_to_json(v) for k, v in vt.times().items()})

md, em = mult_decomp(b, vt), eta_martingales(b, vt)
show("D", md.D)
show("Lhat", md.Lhat)
show("n", em.n)

Y = deflator_dfet(pair, b, md, em, constant(F, 1))
show("deflator", Y)

w = arbitrage_witness(pair, b, em)
print("arbitrage witness loses", w.expectation, "in expectation")

for label, X in (("constant", constant(F, 1)), ("n", em.n)):
    cert = certificate_search(pair, b, md, vt, X)
    print(f"certificate for X = {label}: feasible={cert.feasible} slack={cert.slack}")
