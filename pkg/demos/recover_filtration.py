"""Recover the reference filtration from the enlarged one on a Cox model."""
from deflator_lab import conditional_kernel, enlarge_progressively, infer_filtration
from deflator_lab import generators as gen
from deflator_lab.io import time_to_json
from deflator_lab.inference import condB1_check, terminal_algebra

F, tau = gen.gen_cox_model("demo", gen.Sizes(8, 3))
G = enlarge_progressively(F, tau).G_space
H = terminal_algebra(F)
kern = conditional_kernel(F, tau)
print("outcomes:", F.outcomes)
print("tau:", time_to_json(tau))
for t in kern.levels():
    ok = condB1_check(F, tau, H, kern.kernel[t])
    line = f"level {time_to_json([t])[0]}: B1 {'holds' if ok else 'fails'}"
    if ok:
        rec = infer_filtration(G, tau, H, kern.kernel[t], reference=F)
        line += f", recovered filtration matches F: {rec.matches}"
    print(line)
