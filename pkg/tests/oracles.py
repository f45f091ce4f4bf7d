"""Deliberately naive reference implementations used as test oracles.

Nothing here imports package code paths that it checks; everything is
plain Python loops over the textbook definitions.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction


def onemax(x):
    return sum(int(b) for b in x)


def trap(x, k, s):
    l = len(x)
    total = 0
    for start in range(0, l, s):
        u = sum(int(x[(start + j) % l]) for j in range(k))
        total += k if u == k else k - 1 - u
    return total


def bimodal(x):
    total = 0
    for start in range(0, len(x), 6):
        u = sum(int(b) for b in x[start:start + 6])
        total += {0: 6, 1: 0, 2: 2, 3: 5, 4: 2, 5: 0, 6: 6}[u]
    return total


def hiff(x):
    """Recursive definition: every uniform block at every level scores one."""
    def rec(block):
        here = 1 if all(b == block[0] for b in block) else 0
        if len(block) == 1:
            return here
        half = len(block) // 2
        return here + rec(block[:half]) + rec(block[half:])
    return rec([int(b) for b in x])


def nk(x, table, k):
    total = 0.0
    for i in range(len(table)):
        word = 0
        for j in range(k):
            word = word * 2 + int(x[i + j])
        total += table[i][word]
    return total


def maxcut(x, edges):
    return sum(w for u, v, w in edges if int(x[u]) != int(x[v]))


def spinglass(x, edges):
    total = 0
    for u, v, J in edges:
        su, sv = 2 * int(x[u]) - 1, 2 * int(x[v]) - 1
        total += J * su * sv
    return total


def maxsat(x, clauses):
    sat = 0
    for clause in clauses:
        for lit in clause:
            value = int(x[abs(lit) - 1])
            if (lit > 0 and value == 1) or (lit < 0 and value == 0):
                sat += 1
                break
    return sat


def brute_max(f, length):
    return max(f(bits) for bits in itertools.product((0, 1), repeat=length))


def entropy(probs):
    return -sum(p * math.log2(p) for p in probs if p > 0)


def pairwise_mi(X, i, j):
    """MI and NMI of columns i, j by counting all four bit pairs."""
    n = len(X)
    counts = {(a, b): 0 for a in (0, 1) for b in (0, 1)}
    for row in X:
        counts[(int(row[i]), int(row[j]))] += 1
    joint = [c / n for c in counts.values()]
    pi = [sum(c for (a, _), c in counts.items() if a == v) / n for v in (0, 1)]
    pj = [sum(c for (_, b), c in counts.items() if b == v) / n for v in (0, 1)]
    hj = entropy(joint)
    mi = max(entropy(pi) + entropy(pj) - hj, 0.0)
    return mi, (mi / hj if hj > 0 else 0.0)


def mann_whitney_less_enum(a, b):
    """Exact one-sided p-value by enumerating every relabelling of the pooled sample.

    Statistic: number of pairs (x in a, y in b) with x > y plus half the ties.
    Small values support "a smaller than b".
    """
    pooled = list(a) + list(b)
    n_a = len(a)

    def u_stat(xs, ys):
        return sum(Fraction(1) if x > y else Fraction(1, 2) if x == y else 0
                   for x in xs for y in ys)

    observed = u_stat(a, b)
    hits = total = 0
    for idx in itertools.combinations(range(len(pooled)), n_a):
        chosen = set(idx)
        xs = [pooled[i] for i in idx]
        ys = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        total += 1
        hits += u_stat(xs, ys) <= observed
    return hits / total
