"""The seven message-passing schedules and their iteration accounting.

Flooding and LBP sweep the whole graph per iteration. The dynamic schedules
keep a residual-keyed priority queue: RBP/ARBP propagate one check-to-variable
message at a time (the one with the largest residual), the node-wise variants
update a whole check node at a time, and the parallel variant updates batches
of p nodes selected on pre-batch residuals.

Iteration accounting follows the equal-work convention: one iteration of any
schedule is E check-to-variable message propagations (equivalently M
check-node updates), so c2v_updates is exactly iters_run * E at every
iteration boundary. The syndrome stopping rule is evaluated at iteration
boundaries only.

The residual machinery:
  * exact residual of edge e: |new exact c2v(e) - stored m_cv[e]|
  * approximate residual: |new min-sum value - shadow[e]| where shadow holds
    the min-sum value captured when e was last propagated (0 at init).
Propagated messages always use the exact update equations; min-sum feeds only
the residual ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit, prange

from .codes import TannerGraph, validate_for_decoding
from .kernels import (DEFAULT_KERNEL, KernelConfig, _c2v_all, _clip,
                      _minsum_all, _unsat_count, _v2c)
from .rqueue import _beats, heap_build, heap_update


class ScheduleKind(str, Enum):
    FLOODING = "flooding"
    LBP = "lbp"
    RBP = "rbp"
    ARBP = "arbp"
    NW_RBP = "nw-rbp"
    NW_ARBP = "nw-arbp"
    PNW_ARBP = "pnw-arbp"


_SCHED_ID = {
    ScheduleKind.FLOODING: 0,
    ScheduleKind.LBP: 1,
    ScheduleKind.RBP: 2,
    ScheduleKind.ARBP: 3,
    ScheduleKind.NW_RBP: 4,
    ScheduleKind.NW_ARBP: 5,
    ScheduleKind.PNW_ARBP: 6,
}


@dataclass(frozen=True)
class DecodeConfig:
    schedule: ScheduleKind
    max_iters: int
    kernel: KernelConfig = DEFAULT_KERNEL
    p: int = 1  # batch size, used by the parallel node-wise schedule

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")


@dataclass
class DecodeOutcome:
    success: bool
    bits: np.ndarray
    first_success_iter: int | None
    iters_run: int
    c2v_updates: int
    v2c_updates: int
    residual_computations: int
    unsat_per_iter: np.ndarray  # unsatisfied-check count at each boundary
    trace: np.ndarray | None = None  # rows: (kind 0=edge/1=node, check, var, residual)
    audit_violations: int = 0


def schedule_label(kind: ScheduleKind, p: int = 1) -> str:
    """CSV label; the parallel schedule records its batch size."""
    if kind is ScheduleKind.PNW_ARBP:
        return f"pnw-arbp-p{p}"
    return kind.value


def decode(graph: TannerGraph, channel: np.ndarray, cfg: DecodeConfig,
           trace: bool = False, audit: bool = False) -> DecodeOutcome:
    """Run one frame under cfg.schedule and return the outcome.

    ``trace`` records one row per queue selection (edge pops for RBP/ARBP,
    node selections for the node-wise schedules). ``audit`` cross-checks 1%
    of selections against a full scan of the queue keys.
    """
    sched = ScheduleKind(cfg.schedule)
    sid = _SCHED_ID[sched]
    validate_for_decoding(graph)
    n, m, e = graph.n_vars, graph.n_checks, graph.n_edges
    p = cfg.p if sched is ScheduleKind.PNW_ARBP else 1
    if sched is ScheduleKind.PNW_ARBP and not 1 <= p <= m:
        raise ValueError(f"p={p} outside [1, {m}]")
    llr = np.clip(np.asarray(channel, dtype=np.float64),
                  -cfg.kernel.llr_max, cfg.kernel.llr_max)
    if llr.shape != (n,):
        raise ValueError(f"channel length {llr.shape} does not match n_vars={n}")

    bits = np.empty(n, dtype=np.uint8)
    unsat = np.zeros(cfg.max_iters, dtype=np.int32)
    if trace:
        rows = cfg.max_iters * e if sid in (2, 3) else cfg.max_iters * m + p
        tracebuf = np.empty((rows, 4), dtype=np.float64)
    else:
        tracebuf = np.empty((0, 4), dtype=np.float64)
    audit_stride = 100 if audit else 0

    success, first, iters, c2v, v2c, rescomp, audit_bad, ntr = _decode_one(
        sid, p, llr, graph.edge_check, graph.edge_var, graph.check_ptr,
        graph.var_ptr, graph.var_edges, cfg.max_iters,
        cfg.kernel.llr_max, cfg.kernel.tanh_eps, audit_stride,
        bits, unsat, tracebuf, trace)

    return DecodeOutcome(
        success=bool(success),
        bits=bits,
        first_success_iter=int(first) if first > 0 else None,
        iters_run=int(iters),
        c2v_updates=int(c2v),
        v2c_updates=int(v2c),
        residual_computations=int(rescomp),
        unsat_per_iter=unsat[:iters].copy(),
        trace=tracebuf[:ntr].copy() if trace else None,
        audit_violations=int(audit_bad),
    )


def decode_flooding(graph, channel, cfg: DecodeConfig, **kw) -> DecodeOutcome:
    return decode(graph, channel, _with(cfg, ScheduleKind.FLOODING), **kw)


def decode_lbp(graph, channel, cfg: DecodeConfig, **kw) -> DecodeOutcome:
    return decode(graph, channel, _with(cfg, ScheduleKind.LBP), **kw)


def decode_rbp(graph, channel, cfg: DecodeConfig, approx: bool = False, **kw) -> DecodeOutcome:
    kind = ScheduleKind.ARBP if approx else ScheduleKind.RBP
    return decode(graph, channel, _with(cfg, kind), **kw)


def decode_nw_rbp(graph, channel, cfg: DecodeConfig, approx: bool = False, **kw) -> DecodeOutcome:
    kind = ScheduleKind.NW_ARBP if approx else ScheduleKind.NW_RBP
    return decode(graph, channel, _with(cfg, kind), **kw)


def decode_parallel_nw_arbp(graph, channel, cfg: DecodeConfig, p: int, **kw) -> DecodeOutcome:
    cfg = DecodeConfig(schedule=ScheduleKind.PNW_ARBP, max_iters=cfg.max_iters,
                       kernel=cfg.kernel, p=p)
    return decode(graph, channel, cfg, **kw)


def _with(cfg: DecodeConfig, kind: ScheduleKind) -> DecodeConfig:
    return DecodeConfig(schedule=kind, max_iters=cfg.max_iters, kernel=cfg.kernel, p=cfg.p)


def decode_frames(graph: TannerGraph, llrs: np.ndarray, cfg: DecodeConfig,
                  parallel: bool = True):
    """Decode a batch of frames (rows of llrs); returns per-frame arrays
    (success, first_success_iter or -1, iters_run, c2v, v2c, rescomp).

    Frames are independent; the parallel path distributes them over numba
    threads and is bit-identical to the serial path.
    """
    sched = ScheduleKind(cfg.schedule)
    sid = _SCHED_ID[sched]
    validate_for_decoding(graph)
    p = cfg.p if sched is ScheduleKind.PNW_ARBP else 1
    if sched is ScheduleKind.PNW_ARBP and not 1 <= p <= graph.n_checks:
        raise ValueError(f"p={p} outside [1, {graph.n_checks}]")
    llrs = np.clip(np.ascontiguousarray(llrs, dtype=np.float64),
                   -cfg.kernel.llr_max, cfg.kernel.llr_max)
    f = llrs.shape[0]
    success = np.zeros(f, dtype=np.uint8)
    first = np.full(f, -1, dtype=np.int64)
    iters = np.zeros(f, dtype=np.int64)
    c2v = np.zeros(f, dtype=np.int64)
    v2c = np.zeros(f, dtype=np.int64)
    rescomp = np.zeros(f, dtype=np.int64)
    driver = _decode_batch_par if parallel else _decode_batch_ser
    driver(sid, p, llrs, graph.edge_check, graph.edge_var, graph.check_ptr,
           graph.var_ptr, graph.var_edges, cfg.max_iters,
           cfg.kernel.llr_max, cfg.kernel.tanh_eps,
           success, first, iters, c2v, v2c, rescomp)
    return success.astype(bool), first, iters, c2v, v2c, rescomp


# ---------------------------------------------------------------------------
# jitted schedule cores


@njit(cache=True)
def _boundary(m_cv, channel, var_ptr, var_edges, edge_var, check_ptr,
              bits, unsat_buf, it):
    for v in range(channel.shape[0]):
        s = channel[v]
        for idx in range(var_ptr[v], var_ptr[v + 1]):
            s += m_cv[var_edges[idx]]
        bits[v] = 1 if s < 0.0 else 0
    u = _unsat_count(bits, edge_var, check_ptr)
    unsat_buf[it - 1] = u
    return u == 0


@njit(cache=True)
def _max_check_degree(check_ptr):
    best = 0
    for c in range(check_ptr.shape[0] - 1):
        d = check_ptr[c + 1] - check_ptr[c]
        if d > best:
            best = d
    return best


@njit(cache=True)
def _run_flooding(edge_check, edge_var, check_ptr, var_ptr, var_edges, channel,
                  max_iters, llr_max, tanh_eps, bits, unsat_buf):
    E = edge_var.shape[0]
    M = check_ptr.shape[0] - 1
    m_vc = np.empty(E, dtype=np.float64)
    m_cv = np.zeros(E, dtype=np.float64)
    for e in range(E):
        m_vc[e] = channel[edge_var[e]]
    maxdeg = _max_check_degree(check_ptr)
    out = np.empty(maxdeg, dtype=np.float64)
    scratch = np.empty(maxdeg, dtype=np.float64)
    c2v = 0
    v2c = 0
    success = False
    first = -1
    it = 0
    while it < max_iters:
        it += 1
        # all variable updates from the previous iteration's m_cv
        for e in range(E):
            m_vc[e] = _v2c(m_cv, channel, var_ptr, var_edges, edge_var, e, llr_max)
        v2c += E
        # all check updates from the fresh m_vc
        for c in range(M):
            lo = check_ptr[c]
            deg = check_ptr[c + 1] - lo
            _c2v_all(m_vc, check_ptr, c, tanh_eps, llr_max, out, scratch)
            for i in range(deg):
                m_cv[lo + i] = out[i]
        c2v += E
        if _boundary(m_cv, channel, var_ptr, var_edges, edge_var, check_ptr,
                     bits, unsat_buf, it):
            success = True
            first = it
            break
    return success, first, it, c2v, v2c, 0, 0, 0


@njit(cache=True)
def _run_lbp(edge_check, edge_var, check_ptr, var_ptr, var_edges, channel,
             max_iters, llr_max, tanh_eps, bits, unsat_buf):
    E = edge_var.shape[0]
    M = check_ptr.shape[0] - 1
    m_vc = np.empty(E, dtype=np.float64)
    m_cv = np.zeros(E, dtype=np.float64)
    for e in range(E):
        m_vc[e] = channel[edge_var[e]]
    maxdeg = _max_check_degree(check_ptr)
    out = np.empty(maxdeg, dtype=np.float64)
    scratch = np.empty(maxdeg, dtype=np.float64)
    c2v = 0
    v2c = 0
    success = False
    first = -1
    it = 0
    while it < max_iters:
        it += 1
        for c in range(M):
            lo = check_ptr[c]
            deg = check_ptr[c + 1] - lo
            for i in range(deg):
                e = lo + i
                m_vc[e] = _v2c(m_cv, channel, var_ptr, var_edges, edge_var, e, llr_max)
            _c2v_all(m_vc, check_ptr, c, tanh_eps, llr_max, out, scratch)
            for i in range(deg):
                m_cv[lo + i] = out[i]
            v2c += deg
            c2v += deg
        if _boundary(m_cv, channel, var_ptr, var_edges, edge_var, check_ptr,
                     bits, unsat_buf, it):
            success = True
            first = it
            break
    return success, first, it, c2v, v2c, 0, 0, 0


@njit(cache=True)
def _run_rbp(edge_check, edge_var, check_ptr, var_ptr, var_edges, channel,
             max_iters, llr_max, tanh_eps, approx, audit_stride,
             bits, unsat_buf, trace, trace_on):
    E = edge_var.shape[0]
    M = check_ptr.shape[0] - 1
    m_vc = np.empty(E, dtype=np.float64)
    m_cv = np.zeros(E, dtype=np.float64)
    shadow = np.zeros(E, dtype=np.float64)
    for e in range(E):
        m_vc[e] = channel[edge_var[e]]
    maxdeg = _max_check_degree(check_ptr)
    out = np.empty(maxdeg, dtype=np.float64)
    scratch = np.empty(maxdeg, dtype=np.float64)

    # initial residuals against the all-zero m_cv
    keys = np.empty(E, dtype=np.float64)
    rescomp = 0
    for c in range(M):
        lo = check_ptr[c]
        deg = check_ptr[c + 1] - lo
        if approx:
            _minsum_all(m_vc, check_ptr, c, llr_max, out)
        else:
            _c2v_all(m_vc, check_ptr, c, tanh_eps, llr_max, out, scratch)
        for i in range(deg):
            keys[lo + i] = abs(out[i])
        rescomp += deg
    heap = np.empty(E, dtype=np.int32)
    pos = np.empty(E, dtype=np.int32)
    heap_build(keys, heap, pos)

    c2v = 0
    v2c = 0
    pops = 0
    audit_bad = 0
    ntr = 0
    success = False
    first = -1
    it = 0
    while True:
        e_star = heap[0]
        r_star = keys[e_star]
        if audit_stride > 0 and pops % audit_stride == 0:
            for k in range(E):
                if _beats(keys, k, e_star):
                    audit_bad += 1
                    break
        pops += 1
        c_i = edge_check[e_star]
        v_j = edge_var[e_star]
        if trace_on:
            trace[ntr, 0] = 0.0
            trace[ntr, 1] = c_i
            trace[ntr, 2] = v_j
            trace[ntr, 3] = r_star
            ntr += 1

        # propagate the popped message with the exact update
        lo_i = check_ptr[c_i]
        _c2v_all(m_vc, check_ptr, c_i, tanh_eps, llr_max, out, scratch)
        m_cv[e_star] = out[e_star - lo_i]
        if approx:
            _minsum_all(m_vc, check_ptr, c_i, llr_max, out)
            shadow[e_star] = out[e_star - lo_i]
        heap_update(keys, heap, pos, e_star, 0.0)
        c2v += 1

        # refresh v_j's other outgoing messages and the downstream residuals
        for idx in range(var_ptr[v_j], var_ptr[v_j + 1]):
            e_vc = var_edges[idx]
            if e_vc == e_star:
                continue
            c_a = edge_check[e_vc]
            m_vc[e_vc] = _v2c(m_cv, channel, var_ptr, var_edges, edge_var, e_vc, llr_max)
            v2c += 1
            lo_a = check_ptr[c_a]
            deg_a = check_ptr[c_a + 1] - lo_a
            if approx:
                _minsum_all(m_vc, check_ptr, c_a, llr_max, out)
            else:
                _c2v_all(m_vc, check_ptr, c_a, tanh_eps, llr_max, out, scratch)
            for k in range(deg_a):
                eb = lo_a + k
                if edge_var[eb] == v_j:
                    continue
                ref = shadow[eb] if approx else m_cv[eb]
                heap_update(keys, heap, pos, eb, abs(out[k] - ref))
                rescomp += 1

        if c2v % E == 0:
            it += 1
            if _boundary(m_cv, channel, var_ptr, var_edges, edge_var, check_ptr,
                         bits, unsat_buf, it):
                success = True
                first = it
                break
            if it >= max_iters:
                break
    return success, first, it, c2v, v2c, rescomp, audit_bad, ntr


@njit(cache=True)
def _sift_down_plain(keys, heap, i, size):
    # sift-down on a scratch heap copy (no position index to maintain)
    item = heap[i]
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        best = left
        right = left + 1
        if right < size and _beats(keys, heap[right], heap[left]):
            best = right
        if _beats(keys, heap[best], item):
            heap[i] = heap[best]
            i = best
        else:
            break
    heap[i] = item


@njit(cache=True)
def _run_nw(edge_check, edge_var, check_ptr, var_ptr, var_edges, channel,
            max_iters, llr_max, tanh_eps, approx, p, audit_stride,
            bits, unsat_buf, trace, trace_on):
    E = edge_var.shape[0]
    M = check_ptr.shape[0] - 1
    m_vc = np.empty(E, dtype=np.float64)
    m_cv = np.zeros(E, dtype=np.float64)
    shadow = np.zeros(E, dtype=np.float64)
    for e in range(E):
        m_vc[e] = channel[edge_var[e]]
    maxdeg = _max_check_degree(check_ptr)
    out_i = np.empty(maxdeg, dtype=np.float64)
    ms_i = np.empty(maxdeg, dtype=np.float64)
    out_a = np.empty(maxdeg, dtype=np.float64)
    scratch = np.empty(maxdeg, dtype=np.float64)

    # per-edge residuals plus one queue slot per check node keyed by their max
    res = np.empty(E, dtype=np.float64)
    nkeys = np.empty(M, dtype=np.float64)
    rescomp = 0
    for c in range(M):
        lo = check_ptr[c]
        deg = check_ptr[c + 1] - lo
        if approx:
            _minsum_all(m_vc, check_ptr, c, llr_max, out_a)
        else:
            _c2v_all(m_vc, check_ptr, c, tanh_eps, llr_max, out_a, scratch)
        mk = 0.0
        for i in range(deg):
            r = abs(out_a[i])
            res[lo + i] = r
            if r > mk:
                mk = r
        nkeys[c] = mk
        rescomp += deg
    heap = np.empty(M, dtype=np.int32)
    pos = np.empty(M, dtype=np.int32)
    heap_build(nkeys, heap, pos)

    batch = np.empty(p, dtype=np.int32)
    bkeys = np.empty(p, dtype=np.float64)
    hcopy = np.empty(M, dtype=np.int32)

    c2v = 0
    v2c = 0
    node_updates = 0
    selections = 0
    audit_bad = 0
    ntr = 0
    success = False
    first = -1
    it = 0
    done = False
    while not done:
        # selection on frozen keys
        if p == 1:
            batch[0] = heap[0]
        else:
            for i in range(M):
                hcopy[i] = heap[i]
            size = M
            for t in range(p):
                batch[t] = hcopy[0]
                size -= 1
                hcopy[0] = hcopy[size]
                _sift_down_plain(nkeys, hcopy, 0, size)
            # execute in ascending node index within the batch
            for a in range(1, p):
                key = batch[a]
                b = a - 1
                while b >= 0 and batch[b] > key:
                    batch[b + 1] = batch[b]
                    b -= 1
                batch[b + 1] = key
        for t in range(p):
            bkeys[t] = nkeys[batch[t]]
        if audit_stride > 0 and selections % audit_stride == 0 and p == 1:
            for k in range(M):
                if _beats(nkeys, k, batch[0]):
                    audit_bad += 1
                    break
        selections += 1

        for t in range(p):
            c_i = batch[t]
            if trace_on:
                trace[ntr, 0] = 1.0
                trace[ntr, 1] = c_i
                trace[ntr, 2] = -1.0
                trace[ntr, 3] = bkeys[t]
                ntr += 1
            lo_i = check_ptr[c_i]
            deg_i = check_ptr[c_i + 1] - lo_i
            # inputs to c_i do not change during its own update, so the whole
            # node's outgoing messages can be generated up front
            _c2v_all(m_vc, check_ptr, c_i, tanh_eps, llr_max, out_i, scratch)
            if approx:
                _minsum_all(m_vc, check_ptr, c_i, llr_max, ms_i)
            for ii in range(deg_i):
                t_e = lo_i + ii
                v_k = edge_var[t_e]
                m_cv[t_e] = out_i[ii]
                if approx:
                    shadow[t_e] = ms_i[ii]
                res[t_e] = 0.0
                c2v += 1
                for idx in range(var_ptr[v_k], var_ptr[v_k + 1]):
                    e_vc = var_edges[idx]
                    c_a = edge_check[e_vc]
                    if c_a == c_i:
                        continue
                    m_vc[e_vc] = _v2c(m_cv, channel, var_ptr, var_edges,
                                      edge_var, e_vc, llr_max)
                    v2c += 1
                    lo_a = check_ptr[c_a]
                    deg_a = check_ptr[c_a + 1] - lo_a
                    if approx:
                        _minsum_all(m_vc, check_ptr, c_a, llr_max, out_a)
                    else:
                        _c2v_all(m_vc, check_ptr, c_a, tanh_eps, llr_max, out_a, scratch)
                    mk = 0.0
                    for k in range(deg_a):
                        eb = lo_a + k
                        if edge_var[eb] != v_k:
                            ref = shadow[eb] if approx else m_cv[eb]
                            res[eb] = abs(out_a[k] - ref)
                            rescomp += 1
                        if res[eb] > mk:
                            mk = res[eb]
                    heap_update(nkeys, heap, pos, c_a, mk)
            heap_update(nkeys, heap, pos, c_i, 0.0)
            node_updates += 1

        while node_updates >= (it + 1) * M:
            it += 1
            if _boundary(m_cv, channel, var_ptr, var_edges, edge_var, check_ptr,
                         bits, unsat_buf, it):
                success = True
                first = it
                done = True
                break
            if it >= max_iters:
                done = True
                break
    return success, first, it, c2v, v2c, rescomp, audit_bad, ntr


@njit(cache=True)
def _decode_one(sid, p, llr, edge_check, edge_var, check_ptr, var_ptr, var_edges,
                max_iters, llr_max, tanh_eps, audit_stride, bits, unsat_buf,
                trace, trace_on):
    if sid == 0:
        return _run_flooding(edge_check, edge_var, check_ptr, var_ptr, var_edges,
                             llr, max_iters, llr_max, tanh_eps, bits, unsat_buf)
    elif sid == 1:
        return _run_lbp(edge_check, edge_var, check_ptr, var_ptr, var_edges,
                        llr, max_iters, llr_max, tanh_eps, bits, unsat_buf)
    elif sid == 2 or sid == 3:
        return _run_rbp(edge_check, edge_var, check_ptr, var_ptr, var_edges,
                        llr, max_iters, llr_max, tanh_eps, sid == 3,
                        audit_stride, bits, unsat_buf, trace, trace_on)
    else:
        approx = sid != 4
        pp = p if sid == 6 else 1
        return _run_nw(edge_check, edge_var, check_ptr, var_ptr, var_edges,
                       llr, max_iters, llr_max, tanh_eps, approx, pp,
                       audit_stride, bits, unsat_buf, trace, trace_on)


@njit(cache=True, parallel=True)
def _decode_batch_par(sid, p, llrs, edge_check, edge_var, check_ptr, var_ptr,
                      var_edges, max_iters, llr_max, tanh_eps,
                      success, first, iters, c2v, v2c, rescomp):
    n = var_ptr.shape[0] - 1
    for f in prange(llrs.shape[0]):
        bits = np.empty(n, dtype=np.uint8)
        unsat = np.empty(max_iters, dtype=np.int32)
        trace = np.empty((0, 4), dtype=np.float64)
        ok, fi, itr, a, b, r, _, _ = _decode_one(
            sid, p, llrs[f], edge_check, edge_var, check_ptr, var_ptr,
            var_edges, max_iters, llr_max, tanh_eps, 0, bits, unsat, trace, False)
        success[f] = 1 if ok else 0
        first[f] = fi
        iters[f] = itr
        c2v[f] = a
        v2c[f] = b
        rescomp[f] = r


@njit(cache=True)
def _decode_batch_ser(sid, p, llrs, edge_check, edge_var, check_ptr, var_ptr,
                      var_edges, max_iters, llr_max, tanh_eps,
                      success, first, iters, c2v, v2c, rescomp):
    n = var_ptr.shape[0] - 1
    for f in range(llrs.shape[0]):
        bits = np.empty(n, dtype=np.uint8)
        unsat = np.empty(max_iters, dtype=np.int32)
        trace = np.empty((0, 4), dtype=np.float64)
        ok, fi, itr, a, b, r, _, _ = _decode_one(
            sid, p, llrs[f], edge_check, edge_var, check_ptr, var_ptr,
            var_edges, max_iters, llr_max, tanh_eps, 0, bits, unsat, trace, False)
        success[f] = 1 if ok else 0
        first[f] = fi
        iters[f] = itr
        c2v[f] = a
        v2c[f] = b
        rescomp[f] = r
