#!/usr/bin/env python3
"""Hypothesis: in 'full', every unary arg is affine; spine recursion only via +,-,*."""
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

def count(budget, costs, restricted_unary, mul_affine, pow_base, pow_exp, mul_free):
    lc = costs["leaf"]

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
                base = G if pow_base == "G" else A
                nexp = 2 if pow_exp == "atom2" else 1
                total += base(cc - lc) * nexp
            elif b == "mul" and not mul_free:
                # '*' not allowed as free recursion: both sides affine? treat like affine-×
                rest = cc - lc
                if rest >= lc:
                    total += 2 * G(rest)  # const * G or G * const
            else:
                total += sum(G(a) * G(cc - a) for a in range(lc, cc - lc + 1))
        return total

    return sum(G(c) for c in range(lc, budget + 1))

targets = {"full": 1.01e15, "p1": 7.06e10, "p2": 1.05e13}
rows = []
U3 = {"logF", "sin", "cos"}
U6 = set(UNARY)
for ru, mul_aff, pb, pe, mf in itertools.product(
        [U3, U6, {"logF"}], [True, False], ["G", "A"], ["atom2", "const"], [True, False]):
    r = {
        "full": count(20, profile_costs("uniform"), ru, mul_aff, pb, pe, mf),
        "p1": count(20, profile_costs("p1"), ru, mul_aff, pb, pe, mf),
        "p2": count(20, profile_costs("p2"), ru, mul_aff, pb, pe, mf),
    }
    devs = {k: (r[k] - targets[k]) / targets[k] for k in targets}
    rows.append((max(abs(v) for v in devs.values()), sorted(ru), mul_aff, pb, pe, mf, r, devs))

rows.sort(key=lambda t: t[0])
for maxdev, ru, mul_aff, pb, pe, mf, r, devs in rows[:8]:
    print(f"restr={','.join(ru)} mulA={mul_aff} powbase={pb} powexp={pe} mulfree={mf}: maxdev={maxdev*100:.2f}%")
    for k in targets:
        print(f"    {k}: {r[k]:.4e} ({devs[k]*100:+.2f}%)")
