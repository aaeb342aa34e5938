#!/usr/bin/env python3
"""Hypothesis sweep for the special-argument language in 'full' mode."""
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

def count(budget, costs, arg_lang, sincos_restricted, arg_cap, pow_exp):
    lc = costs["leaf"]
    restricted_unary = {"logF"}
    if sincos_restricted:
        restricted_unary |= {"sin", "cos"}

    @lru_cache(maxsize=None)
    def A(c):
        if c < lc or (arg_cap and c > arg_cap): return 0
        if arg_lang == "atom":
            return 2 if c == lc else 0
        total = 2 if c == lc else 0
        for op in ("add", "sub"):
            cc = c - costs[op]
            total += sum(A(a) * A(cc - a) for a in range(lc, cc - lc + 1))
        if arg_lang == "affine_mul":
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
            if u in restricted_unary:
                total += A(cc)
            else:
                total += G(cc)
        for b in BINARY:
            cc = c - costs[b]
            if cc < 2 * lc: continue
            if b in ("logC", "logB"):
                total += sum(A(a) * A(cc - a) for a in range(lc, cc - lc + 1))
            elif b == "pow":
                if pow_exp == "atom2":
                    total += G(cc - lc) * 2
                else:  # const only
                    total += G(cc - lc)
            else:
                total += sum(G(a) * G(cc - a) for a in range(lc, cc - lc + 1))
        return total

    return sum(G(c) for c in range(lc, budget + 1))

targets = {"full": 1.01e15, "p1": 7.06e10, "p2": 1.05e13}
rows = []
for arg_lang, sincos, cap, pw in itertools.product(
        ["atom", "affine_pm", "affine_mul"], [True, False], [None, 3, 5, 7], ["atom2", "const"]):
    r = {
        "full": count(20, profile_costs("uniform"), arg_lang, sincos, cap, pw),
        "p1": count(20, profile_costs("p1"), arg_lang, sincos, cap, pw),
        "p2": count(20, profile_costs("p2"), arg_lang, sincos, cap, pw),
    }
    devs = {k: (r[k] - targets[k]) / targets[k] for k in targets}
    rows.append((max(abs(v) for v in devs.values()), arg_lang, sincos, cap, pw, r, devs))

rows.sort(key=lambda t: t[0])
for maxdev, arg_lang, sincos, cap, pw, r, devs in rows[:8]:
    print(f"lang={arg_lang:10s} sincos={sincos} cap={cap} pow={pw}: maxdev={maxdev*100:.2f}%")
    for k in targets:
        print(f"    {k}: {r[k]:.4e} ({devs[k]*100:+.2f}%)")
