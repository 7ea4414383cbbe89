"""Braid-fan-conforming maxout networks, simulated on set functions.

A conforming network never leaves the space of braid-compatible
functions, so every neuron can be tracked exactly by its set function:
a neuron's output is the pointwise maximum of its preactivations, and
that is only admissible when the preactivations form a conforming tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .lattice import Interval, LatticeError, format_subset, popcount, to_elements
from .setfn import (
    ConformityError,
    SetFn,
    _frac,
    conformity_violation,
    first_nonzero_interval,
    pointwise_max,
)
from .transform import PwlExpr, phi, point

RULES = ("closed", "recursive", "exact4")


class CapacityError(ValueError):
    """The requested maximum does not fit the given rank vector."""


class LayerConformityError(ConformityError):
    def __init__(self, neuron: int, chain: list[int]):
        msg = (
            f"neuron {neuron}: preactivations are not conforming along chain "
            + " < ".join(format_subset(s) for s in chain)
        )
        super().__init__(msg, chain)
        self.neuron = neuron


@dataclass(frozen=True)
class Affine:
    """``constant + sum_i coeffs[i] * input_i``."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction = Fraction(0)

    @classmethod
    def of(cls, coeffs: Sequence, constant=0) -> "Affine":
        return cls(tuple(_frac(c) for c in coeffs), _frac(constant))

    @classmethod
    def pick(cls, width: int, index: int) -> "Affine":
        coeffs = [Fraction(0)] * width
        coeffs[index] = Fraction(1)
        return cls(tuple(coeffs))

    def apply_setfns(self, inputs: Sequence[SetFn], domain: Interval) -> SetFn:
        out = SetFn.constant(domain, self.constant)
        for c, g in zip(self.coeffs, inputs):
            if c:
                out = out + c * g
        return out

    def apply_values(self, inputs: Sequence[Fraction]) -> Fraction:
        return self.constant + sum((c * v for c, v in zip(self.coeffs, inputs) if c), Fraction(0))


@dataclass(frozen=True)
class LayerSpec:
    rank: int
    neurons: tuple[tuple[Affine, ...], ...]

    def __post_init__(self):
        if self.rank < 1:
            raise LatticeError("maxout rank must be at least 1")
        for j, pre in enumerate(self.neurons):
            if len(pre) != self.rank:
                raise LatticeError(
                    f"neuron {j} has {len(pre)} preactivations, expected {self.rank}"
                )

    @property
    def width(self) -> int:
        return len(self.neurons)


@dataclass(frozen=True)
class NetworkPlan:
    """Input layer: the coordinates ``x_1..x_d`` (set functions ``phi(sigma_{i})``)."""

    d: int
    layers: tuple[LayerSpec, ...]
    output: Affine

    def __post_init__(self):
        width = self.d
        for i, layer in enumerate(self.layers):
            for j, pre in enumerate(layer.neurons):
                for a in pre:
                    if len(a.coeffs) != width:
                        raise LatticeError(
                            f"layer {i + 1} neuron {j} reads {len(a.coeffs)} inputs, "
                            f"previous width is {width}"
                        )
            width = layer.width
        if len(self.output.coeffs) != width:
            raise LatticeError(
                f"output reads {len(self.output.coeffs)} inputs, last width is {width}"
            )

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(layer.rank for layer in self.layers)


@dataclass(frozen=True)
class Certificate:
    """Nonzero alternating sum of the target over an interval of rank ``depth_bound + 1``."""

    S: int
    T: int
    value: Fraction
    depth_bound: int
    rule: str

    def __str__(self):
        return (
            f"Certificate S={format_subset(self.S)} T={format_subset(self.T)} "
            f"value={self.value} depth_bound={self.depth_bound} rule={self.rule}"
        )


def input_setfns(d: int) -> list[SetFn]:
    return [phi(PwlExpr.sigma(d, [i])) for i in range(1, d + 1)]


def apply_maxout_layer(inputs: Sequence[SetFn], layer: LayerSpec) -> list[SetFn]:
    if not inputs:
        raise LatticeError("a layer needs at least one input")
    domain = inputs[0].domain
    for g in inputs[1:]:
        if g.domain != domain:
            raise LatticeError(f"domain mismatch: {domain} vs {g.domain}")
    out = []
    for j, pre in enumerate(layer.neurons):
        fns = [a.apply_setfns(inputs, domain) for a in pre]
        chain = conformity_violation(fns)
        if chain is not None:
            raise LayerConformityError(j, chain)
        out.append(pointwise_max(fns))
    return out


def compose_network(plan: NetworkPlan) -> SetFn:
    """Set function computed by the plan; raises if any neuron is non-conforming."""
    values = input_setfns(plan.d)
    for layer in plan.layers:
        values = apply_maxout_layer(values, layer)
    return plan.output.apply_setfns(values, Interval.boolean(plan.d))


def run_network(plan: NetworkPlan, x: Sequence) -> Fraction:
    x = point(x)
    if len(x) != plan.d:
        raise LatticeError(f"point has {len(x)} coordinates, network expects {plan.d}")
    values: Sequence[Fraction] = x
    for layer in plan.layers:
        values = [max(a.apply_values(values) for a in pre) for pre in layer.neurons]
    return plan.output.apply_values(values)


def _split(items: list[int], parts: int) -> list[list[int]]:
    q, r = divmod(len(items), parts)
    out, start = [], 0
    for i in range(parts):
        size = q + (1 if i < r else 0)
        out.append(items[start:start + size])
        start += size
    return out


def build_max_network(M: int, ranks: Sequence[int], d: Optional[int] = None) -> NetworkPlan:
    """Network computing ``sigma_M`` as a balanced tree of maxout neurons.

    The last layer splits ``M`` into at most ``ranks[-1]`` blocks, each
    small enough for the layers below, and so on downward.  Neurons with
    fewer children than their rank repeat the last child.
    """
    ranks = [int(r) for r in ranks]
    if not ranks or any(r < 1 for r in ranks):
        raise LatticeError("ranks must be a nonempty list of positive integers")
    elems = to_elements(M)
    if d is None:
        d = elems[-1] if elems else 0
    if not elems:
        raise CapacityError("M must be nonempty")
    if elems[-1] > d:
        raise LatticeError(f"M = {elems} does not fit in dimension {d}")
    capacity = math.prod(ranks)
    if len(elems) > capacity:
        raise CapacityError(
            f"|M| = {len(elems)} exceeds the capacity {capacity} of ranks {tuple(ranks)}"
        )

    # height 0 nodes are input coordinates; levels[h] lists the children of each neuron
    levels: list[list[list[int]]] = [[] for _ in range(len(ranks) + 1)]

    def grow(block: list[int], height: int) -> int:
        if height == 0:
            return block[0] - 1
        below = math.prod(ranks[:height - 1])
        parts = _split(block, min(ranks[height - 1], len(block)))
        assert all(len(p) <= below for p in parts)
        children = [grow(p, height - 1) for p in parts]
        levels[height].append(children)
        return len(levels[height]) - 1

    grow(elems, len(ranks))
    layers = []
    width = d
    for height, rank in enumerate(ranks, start=1):
        neurons = []
        for children in levels[height]:
            sources = children + [children[-1]] * (rank - len(children))
            neurons.append(tuple(Affine.pick(width, s) for s in sources))
        layers.append(LayerSpec(rank, tuple(neurons)))
        width = len(neurons)
    return NetworkPlan(d, tuple(layers), Affine.pick(width, 0))


def depth_bound(layers: int, rule: str = "exact4") -> int:
    """Level ``k`` with every conforming ``layers``-layer ReLU function in ``Sf(k)``.

    ``closed``: ``2**(2**l - 1)``.  ``recursive``: ``k_1 = 2``,
    ``k_l = k_{l-1}**2 + k_{l-1}``.  ``exact4``: the same recursion seeded
    with the sharp two-layer value ``k_2 = 4``.
    """
    if layers < 1:
        raise LatticeError("number of hidden layers must be at least 1")
    if rule == "closed":
        return 2 ** (2 ** layers - 1)
    if rule == "recursive":
        k = 2
        for _ in range(layers - 1):
            k = k * k + k
        return k
    if rule == "exact4":
        if layers == 1:
            return 2
        k = 4
        for _ in range(layers - 2):
            k = k * k + k
        return k
    raise LatticeError(f"unknown rule {rule!r}; expected one of {RULES}")


def certify_not_representable(target: SetFn, layers: int, rule: str = "exact4") -> Optional[Certificate]:
    """Certificate that ``target`` is outside ``Sf(k)`` for the depth bound ``k``.

    ``None`` means inconclusive: membership in ``Sf(k)`` is necessary but
    not known to be sufficient for representability.
    """
    if not target.domain.is_full:
        raise LatticeError(f"certification needs a target on [{{}}, [d]], got {target.domain}")
    k = depth_bound(layers, rule)
    hit = first_nonzero_interval(target, k + 1)
    if hit is None:
        return None
    s, t, v = hit
    return Certificate(s, t, v, k, rule)


def verify_certificate(target: SetFn, cert: Certificate) -> bool:
    """Independent re-check: the stated sum is nonzero and the rank matches."""
    from .setfn import alternating_sum

    if popcount(cert.T) - popcount(cert.S) != cert.depth_bound + 1:
        return False
    v = alternating_sum(target, cert.S, cert.T)
    return v != 0 and v == cert.value


def sigma_target(d: int, elements) -> SetFn:
    return phi(PwlExpr.sigma(d, elements))

