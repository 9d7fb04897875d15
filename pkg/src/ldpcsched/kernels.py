"""Belief-propagation message kernels on a Tanner graph.

Variable update: m_vc = C_v + sum of incoming check messages excluding the
target edge. Check update: m_cv = 2*atanh(prod tanh(m_vc/2)) over the other
incident edges. The min-sum check approximation feeds only residual
computation; propagated messages always use the exact update.

Numerics: every stored message is saturated to [-llr_max, +llr_max]
(default 38.0) and the tanh product is clamped to 1 - tanh_eps in magnitude
before atanh, which keeps everything finite in double precision.

The jitted helpers at the bottom operate on the flat graph arrays and are
shared verbatim by the schedule implementations, so a message computed here
is bit-identical to the one a decoder would propagate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .channel import DEFAULT_LLR_MAX
from .codes import TannerGraph


@dataclass(frozen=True)
class KernelConfig:
    """Numerical guards for the message updates."""

    llr_max: float = DEFAULT_LLR_MAX
    tanh_eps: float = 1e-12

    def __post_init__(self):
        if self.llr_max <= 0.0:
            raise ValueError(f"llr_max must be positive, got {self.llr_max}")
        if not 0.0 < self.tanh_eps < 1.0:
            raise ValueError(f"tanh_eps must lie in (0, 1), got {self.tanh_eps}")


DEFAULT_KERNEL = KernelConfig()


@dataclass
class LlrState:
    """Mutable per-edge message state: m_vc (variable-to-check) and m_cv
    (check-to-variable), plus the per-variable channel LLRs."""

    m_vc: np.ndarray
    m_cv: np.ndarray
    channel: np.ndarray


def init_state(graph: TannerGraph, channel: np.ndarray,
               cfg: KernelConfig = DEFAULT_KERNEL) -> LlrState:
    """Fresh state: all m_cv = 0 and m_vc[e] = channel LLR of var(e)."""
    channel = np.asarray(channel, dtype=np.float64)
    if channel.shape != (graph.n_vars,):
        raise ValueError(
            f"channel length {channel.shape} does not match n_vars={graph.n_vars}")
    channel = np.clip(channel, -cfg.llr_max, cfg.llr_max)
    return LlrState(
        m_vc=channel[graph.edge_var].astype(np.float64),
        m_cv=np.zeros(graph.n_edges, dtype=np.float64),
        channel=channel,
    )


def compute_v2c(state: LlrState, graph: TannerGraph, e: int,
                cfg: KernelConfig = DEFAULT_KERNEL) -> float:
    """Variable-to-check message for edge e (pure, does not mutate state)."""
    return float(_v2c(state.m_cv, state.channel, graph.var_ptr, graph.var_edges,
                      graph.edge_var, e, cfg.llr_max))


def compute_c2v(state: LlrState, graph: TannerGraph, e: int,
                cfg: KernelConfig = DEFAULT_KERNEL) -> float:
    """Exact check-to-variable message for edge e (pure)."""
    c = int(graph.edge_check[e])
    deg = graph.check_degree(c)
    out = np.empty(deg, dtype=np.float64)
    _c2v_all(state.m_vc, graph.check_ptr, c, cfg.tanh_eps, cfg.llr_max,
             out, np.empty(deg, dtype=np.float64))
    return float(out[e - graph.check_ptr[c]])


def compute_c2v_minsum(state: LlrState, graph: TannerGraph, c: int,
                       cfg: KernelConfig = DEFAULT_KERNEL) -> np.ndarray:
    """Min-sum check update for all edges of check c, in check-edge order.

    The smallest incoming reliability is assigned to every edge except the
    one it arrived on, which gets the second smallest; signs are the product
    of the other incoming signs, with sign(0) = +.
    """
    deg = graph.check_degree(c)
    if deg < 2:
        raise ValueError(f"check {c} has degree {deg} (< 2)")
    out = np.empty(deg, dtype=np.float64)
    _minsum_all(state.m_vc, graph.check_ptr, c, cfg.llr_max, out)
    return out


def residual_exact(state: LlrState, graph: TannerGraph, e: int,
                   cfg: KernelConfig = DEFAULT_KERNEL) -> float:
    """|new exact c2v - stored m_cv| for edge e (LLR space is 1-D, so the
    message-space norm is the absolute difference)."""
    return abs(compute_c2v(state, graph, e, cfg) - float(state.m_cv[e]))


def residual_approx(state: LlrState, graph: TannerGraph, c: int,
                    shadow: np.ndarray,
                    cfg: KernelConfig = DEFAULT_KERNEL) -> np.ndarray:
    """Approximate residuals |minsum - shadow| for all edges of check c.

    ``shadow`` is the per-edge store of min-sum values captured when each
    message was last propagated (zeros at init), so the difference compares
    approximate-to-approximate while propagation stays exact.
    """
    ms = compute_c2v_minsum(state, graph, c, cfg)
    lo, hi = graph.check_ptr[c], graph.check_ptr[c + 1]
    return np.abs(ms - shadow[lo:hi])


def posterior_and_decide(state: LlrState, graph: TannerGraph) -> tuple[np.ndarray, np.ndarray]:
    """Posterior LLRs (channel plus all incident m_cv) and hard bits.

    Bit is 0 when the posterior is >= 0 (ties decide 0, matching the
    log p(y|0)/p(y|1) convention).
    """
    bits = np.empty(graph.n_vars, dtype=np.uint8)
    post = np.empty(graph.n_vars, dtype=np.float64)
    _posterior(state.m_cv, state.channel, graph.var_ptr, graph.var_edges, bits, post)
    return bits, post


def syndrome_ok(bits: np.ndarray, graph: TannerGraph) -> bool:
    """True iff every check's incident bits XOR to zero."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (graph.n_vars,):
        raise ValueError(f"bits length {bits.shape} does not match n_vars={graph.n_vars}")
    return _unsat_count(bits, graph.edge_var, graph.check_ptr) == 0


def unsat_check_count(bits: np.ndarray, graph: TannerGraph) -> int:
    """Number of parity checks violated by the given hard decisions."""
    bits = np.asarray(bits, dtype=np.uint8)
    return int(_unsat_count(bits, graph.edge_var, graph.check_ptr))


# ---------------------------------------------------------------------------
# jitted kernels shared with the schedule implementations


@njit(cache=True, inline="always")
def _clip(x, llr_max):
    if x > llr_max:
        return llr_max
    if x < -llr_max:
        return -llr_max
    return x


@njit(cache=True)
def _v2c(m_cv, channel, var_ptr, var_edges, edge_var, e, llr_max):
    v = edge_var[e]
    s = channel[v]
    for idx in range(var_ptr[v], var_ptr[v + 1]):
        ep = var_edges[idx]
        if ep != e:
            s += m_cv[ep]
    return _clip(s, llr_max)


@njit(cache=True)
def _c2v_all(m_vc, check_ptr, c, tanh_eps, llr_max, out, scratch):
    # prefix/suffix tanh products give every leave-one-out product in O(deg)
    # without dividing (so a zero message poses no problem)
    lo = check_ptr[c]
    deg = check_ptr[c + 1] - lo
    cap = 1.0 - tanh_eps
    for i in range(deg):
        scratch[i] = np.tanh(0.5 * m_vc[lo + i])
    acc = 1.0
    for i in range(deg):
        out[i] = acc                       # product of factors 0..i-1
        acc *= scratch[i]
    acc = 1.0
    for i in range(deg - 1, -1, -1):
        p = out[i] * acc                   # exclude factor i
        if p > cap:
            p = cap
        elif p < -cap:
            p = -cap
        out[i] = _clip(2.0 * np.arctanh(p), llr_max)
        acc *= scratch[i]


@njit(cache=True)
def _minsum_all(m_vc, check_ptr, c, llr_max, out):
    lo = check_ptr[c]
    deg = check_ptr[c + 1] - lo
    min1 = np.inf
    min2 = np.inf
    arg1 = 0
    sign_all = 1.0
    for i in range(deg):
        x = m_vc[lo + i]
        if x < 0.0:
            sign_all = -sign_all
            x = -x
        if x < min1:                       # strict: ties keep the lowest index
            min2 = min1
            min1 = x
            arg1 = i
        elif x < min2:
            min2 = x
    for i in range(deg):
        s = sign_all if m_vc[lo + i] >= 0.0 else -sign_all
        mag = min2 if i == arg1 else min1
        out[i] = _clip(s * mag, llr_max)


@njit(cache=True)
def _posterior(m_cv, channel, var_ptr, var_edges, bits, post):
    for v in range(channel.shape[0]):
        s = channel[v]
        for idx in range(var_ptr[v], var_ptr[v + 1]):
            s += m_cv[var_edges[idx]]
        post[v] = s
        bits[v] = 1 if s < 0.0 else 0


@njit(cache=True)
def _unsat_count(bits, edge_var, check_ptr):
    unsat = 0
    for c in range(check_ptr.shape[0] - 1):
        parity = 0
        for k in range(check_ptr[c], check_ptr[c + 1]):
            parity ^= bits[edge_var[k]]
        unsat += parity
    return unsat
