"""Recovering the reference filtration from the enlarged one and the random time.

On a finite space a measure makes sigma(tau) trivial exactly when it lives on
one level set {tau = t}, and a P-null set is anything outside the support of
P.  Every check below reduces to comparing traces of partitions on a support.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import B1Violated, require
from .space import INF

ZERO = Fraction(0)


@dataclass(frozen=True)
class SigmaAlg:
    """A sigma-algebra on range(n) given by its atoms."""
    atoms: tuple

    @classmethod
    def of(cls, blocks, n=None):
        atoms = tuple(sorted(tuple(sorted(int(w) for w in b)) for b in blocks))
        flat = sorted(w for a in atoms for w in a)
        require(all(atoms), "empty atom")
        require(flat == list(range(n if n is not None else len(flat))), "atoms do not partition the outcomes")
        return cls(atoms)

    @classmethod
    def discrete(cls, n):
        return cls.of([[w] for w in range(n)], n)

    @classmethod
    def trivial(cls, n):
        return cls.of([list(range(n))], n)

    def atom_of(self):
        out = {}
        for k, a in enumerate(self.atoms):
            for w in a:
                out[w] = k
        return out


def terminal_algebra(space):
    return SigmaAlg.of(space.blocks(space.T), space.n)


def join_with_time(space, tau):
    """Atoms of the terminal sigma-algebra of space joined with sigma(tau)."""
    blocks = {}
    for w in range(space.n):
        blocks.setdefault((space.labels[space.T, w], tau[w]), []).append(w)
    return SigmaAlg.of(blocks.values(), space.n)


@dataclass
class Kernel:
    """kernel[t][w] = Q(w | tau = t); nu[t] = Q(tau = t)."""
    kernel: dict
    nu: dict

    def levels(self):
        return sorted(self.kernel)


def conditional_kernel(space, tau):
    tau = np.asarray(tau, dtype=float)
    nu, kernel = {}, {}
    for t in sorted(set(tau.tolist())):
        on = tau == t
        nu[t] = sum(space.prob[on], ZERO)
        kernel[t] = np.where(on, space.prob, ZERO) / nu[t]
    require(sum(nu.values()) == 1, "law of tau does not sum to 1")
    for t, k in kernel.items():
        require(all(k[w] == 0 for w in range(space.n) if tau[w] != t), "kernel leaks off its level set")
    total = sum((nu[t] * kernel[t] for t in kernel), np.full(space.n, ZERO, dtype=object))
    require((total == space.prob).all(), "Q != sum nu(t) K(t)")
    return Kernel(kernel, nu)


def _trace_classes(alg, support):
    """Map each support point to the atom of alg containing it."""
    index = alg.atom_of()
    return {w: index[w] for w in support}


def _traces_covered(fine, coarse, support):
    """Every trace of ``fine`` on support is a trace of some set in ``coarse``."""
    fi, ci = _trace_classes(fine, support), _trace_classes(coarse, support)
    owner = {}
    for w in support:
        if owner.setdefault(ci[w], fi[w]) != fi[w]:
            return False
    return True


def saturation_check(space, tau, H, G_inf=None):
    """H saturates G_inf: on every level set the traces of G_inf are traces of H.

    Checked on the full level sets (the kernel measures) and on point masses,
    which together exhaust the null-set structures of measures making tau trivial.
    """
    tau = np.asarray(tau, dtype=float)
    G_inf = G_inf or join_with_time(space, tau)
    kernel = conditional_kernel(space, tau)
    for t in kernel.levels():
        level = [w for w in range(space.n) if tau[w] == t]
        if not _traces_covered(G_inf, H, level):
            return False
        if not all(_traces_covered(G_inf, H, [w]) for w in level):
            return False
    return True


def condB1_check(space, tau, H, P):
    tau = np.asarray(tau, dtype=float)
    P = np.asarray(P, dtype=object)
    require(sum(P, ZERO) == 1 and all(p >= 0 for p in P), "P is not a probability")
    support = [w for w in range(space.n) if P[w] > 0]
    trivial = len({tau[w] for w in support}) == 1
    dominated = all(any(P[w] > 0 for w in atom) for atom in H.atoms)
    ok = trivial and dominated
    if ok and len(set(tau.tolist())) > 1:
        measurable = all(len({tau[w] for w in atom}) == 1 for atom in H.atoms)
        require(not measurable, "tau is H-measurable although B1 holds")
    return ok


def find_b1_measure(space, tau, H):
    """First kernel level t with K(t) satisfying B1 on H, or None."""
    kernel = conditional_kernel(space, tau)
    for t in kernel.levels():
        if condB1_check(space, tau, H, kernel.kernel[t]):
            return t, kernel.kernel[t]
    return None


def _components(H, G_part, support):
    """Atoms of {A in H : A = A' P-a.s. for some A' in G_s}."""
    parent = list(range(len(H.atoms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    h_of = H.atom_of()
    for block in G_part:
        seen = [h_of[w] for w in block if w in support]
        for k in seen[1:]:
            parent[find(k)] = find(seen[0])
    groups = {}
    for k, atom in enumerate(H.atoms):
        groups.setdefault(find(k), []).extend(atom)
    return SigmaAlg.of(groups.values(), sum(len(a) for a in H.atoms))


@dataclass
class Recovery:
    partitions: list
    matches: bool = None


def infer_filtration(space_G, tau, H, P, reference=None):
    """The filtration H_s recovered from G_s; compared with ``reference`` if given."""
    if not condB1_check(space_G, tau, H, P):
        raise B1Violated("P does not satisfy condition B1 on H")
    support = {w for w in range(space_G.n) if P[w] > 0}
    parts = [_components(H, space_G.blocks(s), support) for s in range(space_G.T + 1)]
    matches = None
    if reference is not None:
        matches = all(parts[s] == SigmaAlg.of(reference.blocks(s), reference.n)
                      for s in range(reference.T + 1))
    return Recovery(parts, matches)


def cox_branch_split(F, tau, barrier, stop, xi_support, xi_weights, k):
    """Split Q(tau = t, f) into the smooth branch {T != t} and the jump branch {T = t}.

    For a barrier a_s = s + 1_{T <= s}, the law of tau on each barrier path is
    Q(a_{t-1} <= xi < a_t); on {T = t} the window widens by the jump.
    Returns (identity_holds, first level whose kernel charges every path).
    """
    m = len(xi_support)
    kern = conditional_kernel(F, tau)

    def window(lo, hi):
        return sum((w for x, w in zip(xi_support, xi_weights) if lo <= x < hi), ZERO)

    holds = True
    for t in kern.levels():
        if t == INF or t == 0:
            continue
        t = int(t)
        for i in range(k):
            rows = list(range(i * m, (i + 1) * m))
            path = sum(F.prob[rows], ZERO)
            lagged = 1 if stop[i] <= t - 1 else 0
            if stop[i] == t:
                branch = window(t - 1, t + 1)
            else:
                branch = window(t - 1 + lagged, t + lagged)
            lhs = sum((kern.kernel[t][r] for r in rows), ZERO) * kern.nu[t]
            holds &= lhs == path * branch
    found = find_b1_measure(F, tau, terminal_algebra(F))
    return bool(holds), (found[0] if found else None)
