"""Brute-force reference implementations on Python frozensets.

Nothing here touches the bitmask machinery of the package: subsets are
frozensets of 1-based labels, set functions are plain dicts, and every
quantity is computed straight from its definition.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def powerset(ground):
    ground = sorted(ground)
    for r in range(len(ground) + 1):
        for combo in itertools.combinations(ground, r):
            yield frozenset(combo)


def between(S, T):
    """All Q with S <= Q <= T."""
    for extra in powerset(T - S):
        yield S | extra


def as_dict(F):
    """Package SetFn -> {frozenset: Fraction}, decoding bits by hand."""
    out = {}
    for s, v in F.items():
        out[frozenset(i + 1 for i in range(s.bit_length()) if s >> i & 1)] = v
    return out


def alt_sum(F, S, T):
    return sum(((-1) ** len(Q - S) * F[Q] for Q in between(S, T)), Fraction(0))


def intervals_of_rank(X, Y, r):
    for S in between(X, Y):
        for add in itertools.combinations(sorted(Y - S), r):
            yield S, S | frozenset(add)


def level(F, X, Y):
    """Smallest k with every rank-(k+1) alternating sum zero."""
    n = len(Y - X)
    for k in range(n + 1):
        if all(alt_sum(F, S, T) == 0 for S, T in intervals_of_rank(X, Y, k + 1)):
            return k
    return n


def in_level(F, X, Y, k):
    return all(alt_sum(F, S, T) == 0 for S, T in intervals_of_rank(X, Y, k + 1))


def hc(F):
    keys = list(F)
    return not any(
        S <= T and F[S] * F[T] < 0 for S in keys for T in keys
    )


def maximal_chains(X, Y):
    for order in itertools.permutations(sorted(Y - X)):
        chain = [X]
        for e in order:
            chain.append(chain[-1] | {e})
        yield chain


def conforming(fns, X, Y):
    """Along every maximal chain some member attains the maximum everywhere."""
    for chain in maximal_chains(X, Y):
        if not any(all(f[Q] == max(g[Q] for g in fns) for Q in chain) for f in fns):
            return False
    return True


def sigma_value(M, x):
    return max(x[i - 1] for i in M)


def expr_value(terms, constant, x):
    """terms: list of (iterable M, coeff)."""
    return constant + sum((c * sigma_value(M, x) for M, c in terms), Fraction(0))


def phi_table(terms, constant, d):
    """S -> f(indicator of S), evaluated from the max formula."""
    out = {}
    for S in powerset(range(1, d + 1)):
        x = [Fraction(1) if i in S else Fraction(0) for i in range(1, d + 1)]
        out[S] = expr_value(terms, constant, x)
    return out


def interpolate(F, x):
    """Linear interpolation of F on the braid cone containing x.

    x = sum_i (x_{j_i} - x_{j_{i+1}}) 1_{S_i} + x_{j_d} 1_{[d]}, so the
    braid-linear extension of S -> F(S) - F({}) plus F({}) follows.
    """
    d = len(x)
    order = sorted(range(1, d + 1), key=lambda i: (-x[i - 1], i))
    total = F[frozenset()]
    for pos in range(d):
        prefix = frozenset(order[: pos + 1])
        nxt = x[order[pos + 1] - 1] if pos + 1 < d else Fraction(0)
        total += (x[order[pos] - 1] - nxt) * (F[prefix] - F[frozenset()])
    return total
