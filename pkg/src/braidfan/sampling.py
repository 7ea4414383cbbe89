"""Random set functions in ``Sf(k)`` that satisfy HC.

Sample ``i`` draws from its own RNG stream seeded by ``(seed, i)`` so a
batch is reproducible regardless of how it is split up.  Generators are
used round-robin by index:

* ``terms``: ``phi`` of a random expression with ``|M| <= k`` terms;
* ``difference``: ``c * (phi(sigma_M) - phi(sigma_M'))``, always in HC;
* ``disjoint_sum``: sums of ``difference`` draws on disjoint ground elements;
* ``conjunction``: ``c * ([A <= S] - [B <= S])`` with ``|A|, |B| <= k``, always in HC;
* ``difference_product``: ``c * prod_i (x_{a_i} - x_{b_i})`` over at most ``k``
  disjoint pairs, always in HC (comparable support elements pick the same
  member of every pair, hence share a sign).

``dense_terms`` (every ``sigma_M`` with ``|M| <= k`` kept with probability
1/2, integer coefficients in ``[-3, 3]``) is not in the default rotation.
It rarely satisfies HC and is what mutation runs draw from.

Every candidate is checked for ``Sf(k)`` membership and HC before it is
accepted; nothing is taken on trust.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .lattice import Interval
from .setfn import SetFn, in_hc, in_level_space
from .transform import PwlExpr, phi

GENERATORS = ("terms", "difference", "disjoint_sum", "conjunction", "difference_product")

_COEFFS = [Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(3, 2), Fraction(2, 3)]


def rng_for(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}/{index}")


def _coeff(rng: random.Random, signed: bool = True) -> Fraction:
    c = rng.choice(_COEFFS)
    return -c if signed and rng.random() < 0.5 else c


def _subset(rng: random.Random, pool: list[int], lo: int, hi: int) -> int:
    size = rng.randint(lo, min(hi, len(pool)))
    bits = 0
    for e in rng.sample(pool, size):
        bits |= 1 << e
    return bits


def _terms(rng, d, k) -> SetFn:
    pool = list(range(d))
    n_terms = rng.randint(1, 3)
    terms = [(_subset(rng, pool, 1, k), _coeff(rng)) for _ in range(n_terms)]
    constant = _coeff(rng) if rng.random() < 0.3 else 0
    return phi(PwlExpr.build(d, terms, constant))


def _difference_on(rng, d, k, pool) -> SetFn:
    a = _subset(rng, pool, 1, k)
    b = a
    while b == a:
        b = _subset(rng, pool, 1, k)
    c = _coeff(rng)
    return phi(PwlExpr.build(d, [(a, c), (b, -c)]))


def _difference(rng, d, k) -> SetFn:
    return _difference_on(rng, d, k, list(range(d)))


def _disjoint_sum(rng, d, k) -> SetFn:
    pool = list(range(d))
    rng.shuffle(pool)
    parts = rng.randint(2, 3)
    chunk = max(2, len(pool) // parts)
    total = SetFn.zero(Interval.boolean(d))
    for i in range(parts):
        sub = pool[i * chunk:(i + 1) * chunk]
        if len(sub) < 2:
            break
        total = total + _difference_on(rng, d, k, sub)
    return total


def _conjunction(rng, d, k) -> SetFn:
    pool = list(range(d))
    a = _subset(rng, pool, 1, k)
    b = a
    while b == a:
        b = _subset(rng, pool, 1, k)
    c = _coeff(rng)
    return SetFn.from_function(
        Interval.boolean(d), lambda s: c * ((s & a == a) - (s & b == b))
    )


def _difference_product(rng, d, k) -> SetFn:
    pairs = rng.randint(1, min(k, d // 2))
    chosen = rng.sample(range(d), 2 * pairs)
    c = _coeff(rng)

    def value(s):
        out = c
        for a, b in zip(chosen[::2], chosen[1::2]):
            out *= (s >> a & 1) - (s >> b & 1)
        return out

    return SetFn.from_function(Interval.boolean(d), value)


def _dense_terms(rng, d, k) -> SetFn:
    terms = [
        (m, rng.randint(-3, 3))
        for m in range(1, 1 << d)
        if bin(m).count("1") <= k and rng.random() < 0.5
    ]
    return phi(PwlExpr.build(d, terms, rng.randint(-3, 3)))


_DISPATCH = {
    "terms": _terms,
    "difference": _difference,
    "disjoint_sum": _disjoint_sum,
    "conjunction": _conjunction,
    "difference_product": _difference_product,
    "dense_terms": _dense_terms,
}


@dataclass
class SampleBatch:
    samples: list[SetFn] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)
    attempted: int = 0
    rejected_level: int = 0
    rejected_hc: int = 0

    @property
    def accepted(self) -> int:
        return len(self.samples)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempted if self.attempted else 0.0


def candidates(d: int, k: int, seed: int,
               generators: Sequence[str] = GENERATORS) -> Iterator[tuple[str, SetFn]]:
    """Unfiltered candidates, index by index."""
    if k < 1 or d < 1:
        raise ValueError("need d >= 1 and k >= 1")
    unknown = set(generators) - set(_DISPATCH)
    if unknown or not generators:
        raise ValueError(f"unknown generators {sorted(unknown)}")
    i = 0
    while True:
        rng = rng_for(seed, i)
        name = generators[i % len(generators)]
        if name not in ("terms", "dense_terms") and d == 1:
            name = "terms"
        yield name, _DISPATCH[name](rng, d, k)
        i += 1


def sample_sf_hc(d: int, k: int, n: int, seed: int, max_attempts: Optional[int] = None,
                 check_hc: bool = True, generators: Sequence[str] = GENERATORS) -> SampleBatch:
    """Up to ``n`` accepted samples of ``Sf(k)`` intersected with HC.

    ``check_hc=False`` drops the HC filter (used for mutation runs).
    """
    cap = max_attempts if max_attempts is not None else 50 * n
    batch = SampleBatch()
    for name, F in candidates(d, k, seed, generators):
        if batch.accepted >= n or batch.attempted >= cap:
            break
        batch.attempted += 1
        if not in_level_space(F, k):
            batch.rejected_level += 1
            continue
        if check_hc and not in_hc(F):
            batch.rejected_hc += 1
            continue
        batch.samples.append(F)
        batch.sources.append(name)
    return batch


def affine_hc_family(d: int) -> list[SetFn]:
    """Structured members of ``Sf(1)`` in HC: constants, coordinates, their differences."""
    dom = Interval.boolean(d)
    out = [SetFn.constant(dom, 1)]
    coords = [phi(PwlExpr.sigma(d, [i])) for i in range(1, d + 1)]
    out.extend(coords)
    for i in range(d):
        for j in range(d):
            if i != j:
                out.append(coords[i] - coords[j])
    return out


