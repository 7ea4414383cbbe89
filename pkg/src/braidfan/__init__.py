"""Exact set-function tools for braid-fan-compatible CPWL functions and maxout networks."""

from .lattice import GuardError, Interval, LatticeError, from_elements, to_elements
from .network import (
    Certificate,
    NetworkPlan,
    build_max_network,
    certify_not_representable,
    compose_network,
    depth_bound,
    run_network,
)
from .setfn import (
    ConformityError,
    SetFn,
    alternating_sum,
    in_hc,
    in_level_space,
    is_conforming,
    min_level,
    pointwise_max,
)
from .transform import PwlExpr, evaluate_setfn, phi, phi_inverse

__version__ = "0.1.0"
