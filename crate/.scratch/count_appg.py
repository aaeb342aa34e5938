#!/usr/bin/env python3
"""Reduced-grammar enumeration example: {logB, logF, *, +, -, log, exp, ^}, complexity 8."""
from functools import lru_cache
import sys
sys.setrecursionlimit(100000)

def count(budget, mode, le):
    UN = ["logF", "log", "exp"]
    BIN = ["add", "sub", "mul", "pow", "logB"]
    restricted = {"logF", "log", "exp"} if mode == "full" else set()

    @lru_cache(maxsize=None)
    def A(c):
        if c < 1: return 0
        t = 2 if c == 1 else 0
        for _ in ("add", "sub"):
            t += sum(A(a) * A(c - 1 - a) for a in range(1, c - 1))
        return t

    @lru_cache(maxsize=None)
    def G(c):
        if c < 1: return 0
        t = 2 if c == 1 else 0
        for u in UN:
            t += A(c - 1) if (mode == "full" and u in restricted) else G(c - 1)
        for b in BIN:
            cc = c - 1
            if cc < 2: continue
            if mode == "full" and b == "logB":
                t += sum(A(a) * A(cc - a) for a in range(1, cc))
            elif b == "pow" and mode in ("atom", "full"):
                t += G(cc - 1) * 2
            else:
                t += sum(G(a) * G(cc - a) for a in range(1, cc))
        return t

    return sum(G(c) for c in range(1, budget + 1)) if le else G(budget)

for mode in ("none", "atom", "full"):
    for le in (True, False):
        print(f"mode={mode} le={le}: {count(8, mode, le):,}")
