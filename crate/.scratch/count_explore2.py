#!/usr/bin/env python3
"""Sweep leaf/unary/binary multiplicities for the unconstrained count."""
from functools import lru_cache
import sys
sys.setrecursionlimit(100000)

def none_count(budget, L, U, B, le):
    @lru_cache(maxsize=None)
    def G(c):
        if c < 1: return 0
        t = L if c == 1 else 0
        t += U * G(c - 1)
        t += B * sum(G(a) * G(c - 1 - a) for a in range(1, c - 1))
        return t
    if le:
        return sum(G(c) for c in range(1, budget + 1))
    return G(budget)

target = 6.19e19
for L in (1, 2, 3):
    for U in range(4, 9):
        for B in range(4, 9):
            for le in (False, True):
                v = none_count(20, L, U, B, le)
                d = abs(v - target) / target
                if d < 0.02:
                    print(f"L={L} U={U} B={B} le={le}: {v:.4e} dev {d*100:.2f}%")
