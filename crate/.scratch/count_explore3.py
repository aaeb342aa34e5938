#!/usr/bin/env python3
"""With le=True, ordered trees fixed: tune the structural-constraint details."""
from functools import lru_cache
import sys, itertools
sys.setrecursionlimit(100000)

UNARY = ["logF", "log", "exp", "abs", "sin", "cos"]
BINARY = ["add", "sub", "mul", "pow", "logC", "logB"]

def profile_costs(profile):
    c = {"leaf": 1}
    if profile == "uniform":
        for o in UNARY + BINARY: c[o] = 1
    elif profile == "p1":
        lo = {"logC", "logB", "add", "sub"}
        for o in UNARY + BINARY: c[o] = 1 if o in lo else 5
    elif profile == "p2":
        lo = {"logF", "log", "mul", "add", "sub"}
        for o in UNARY + BINARY: c[o] = 1 if o in lo else 5
    return c

def count(budget, costs, mode, sincos_restricted, mul_affine):
    lc = costs["leaf"]
    restricted_unary = {"logF"}
    if sincos_restricted:
        restricted_unary |= {"sin", "cos"}

    @lru_cache(maxsize=None)
    def A(c):
        if c < lc: return 0
        total = 2 if c == lc else 0
        for op in ("add", "sub"):
            cc = c - costs[op]
            total += sum(A(a) * A(cc - a) for a in range(lc, cc - lc + 1))
        if mul_affine:
            rest = c - costs["mul"] - lc
            if rest >= lc:
                total += 2 * A(rest) - (1 if rest == lc else 0)
        return total

    @lru_cache(maxsize=None)
    def G(c):
        if c < lc: return 0
        total = 2 if c == lc else 0
        for u in UNARY:
            cc = c - costs[u]
            if mode == "full" and u in restricted_unary:
                total += A(cc)
            else:
                total += G(cc)
        for b in BINARY:
            cc = c - costs[b]
            if cc < 2 * lc: continue
            if mode == "full" and b in ("logC", "logB"):
                total += sum(A(a) * A(cc - a) for a in range(lc, cc - lc + 1))
            elif b == "pow" and mode in ("atom", "full"):
                total += G(cc - lc) * 2
            else:
                total += sum(G(a) * G(cc - a) for a in range(lc, cc - lc + 1))
        return total

    return sum(G(c) for c in range(lc, budget + 1))

targets = {"none": 6.19e19, "atom": 3.50e19, "full": 1.01e15, "p1": 7.06e10, "p2": 1.05e13}
print("none:", f"{count(20, profile_costs('uniform'), 'none', False, False):.4e}")
print("atom:", f"{count(20, profile_costs('uniform'), 'atom', False, False):.4e}")
for sincos, mul_aff in itertools.product([True, False], [True, False]):
    r_full = count(20, profile_costs("uniform"), "full", sincos, mul_aff)
    r_p1 = count(20, profile_costs("p1"), "full", sincos, mul_aff)
    r_p2 = count(20, profile_costs("p2"), "full", sincos, mul_aff)
    print(f"sincos_restr={sincos} mul_affine={mul_aff}: "
          f"full={r_full:.4e} ({(r_full-targets['full'])/targets['full']*100:+.2f}%) "
          f"p1={r_p1:.4e} ({(r_p1-targets['p1'])/targets['p1']*100:+.2f}%) "
          f"p2={r_p2:.4e} ({(r_p2-targets['p2'])/targets['p2']*100:+.2f}%)")
