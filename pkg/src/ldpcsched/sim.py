"""Monte-Carlo FER harness: experiment configuration, CSV emission, and the
trapping-set divergence diagnostic.

A frame's outcome at iteration cap k is a pure function of its first-success
iteration (the decoder stops at the first satisfied syndrome), so one pass at
max_iters yields the whole FER-vs-iterations curve per schedule:
FER(k) = fraction of frames whose first success is absent or later than k.

Frames are seeded individually (Philox keyed by master_seed and frame index)
and simulated in fixed-size chunks, so results are byte-identical whether
frames run serially or across numba threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelParams, frame_rng, transmit_all_zero
from .codes import TannerGraph, load_code
from .kernels import DEFAULT_KERNEL, KernelConfig
from .schedules import (DecodeConfig, ScheduleKind, decode, decode_frames,
                        schedule_label)

CHUNK_FRAMES = 1024
WILSON_Z = 1.959963984540054  # 97.5% normal quantile


@dataclass(frozen=True)
class Experiment:
    """One simulation campaign: a code, schedules, SNR points, and stopping
    targets. The sweep at each (schedule, SNR) stops once both min_frames and
    min_errors at the largest iteration cap are met (set min_errors=0 to run
    a fixed frame count; max_frames > 0 adds a hard cap)."""

    code_path: str | Path
    code_format: str
    schedules: tuple = (ScheduleKind.LBP,)
    ebno_db: tuple = (1.75,)
    max_iters: int = 50
    min_frames: int = 1000
    min_errors: int = 100
    master_seed: int = 1
    snr_convention: str = "ebno"
    p: int = 1
    max_frames: int = 0
    kernel: KernelConfig = DEFAULT_KERNEL

    def __post_init__(self):
        if self.min_frames < 1:
            raise ValueError("min_frames must be >= 1")
        if self.min_errors < 0:
            raise ValueError("min_errors must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.schedules:
            raise ValueError("need at least one schedule")
        if not self.ebno_db:
            raise ValueError("need at least one SNR point")
        object.__setattr__(self, "schedules",
                           tuple(ScheduleKind(s) for s in self.schedules))
        object.__setattr__(self, "ebno_db", tuple(float(x) for x in self.ebno_db))


@dataclass(frozen=True)
class FerRecord:
    schedule: str
    ebno_db: float
    iter_cap: int
    frames: int
    errors: int
    fer: float
    ci_lo: float
    ci_hi: float


def wilson_interval(errors: int, frames: int, z: float = WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if frames < 1:
        raise ValueError("frames must be >= 1")
    p = errors / frames
    denom = 1.0 + z * z / frames
    center = (p + z * z / (2.0 * frames)) / denom
    half = z * math.sqrt(p * (1.0 - p) / frames + z * z / (4.0 * frames * frames)) / denom
    # the boundary cases must stay exact so the interval always contains p
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == frames else min(1.0, center + half)
    return lo, hi


def design_rate(graph: TannerGraph) -> float:
    return (graph.n_vars - graph.n_checks) / graph.n_vars


def _first_success_histogram(exp: Experiment, graph: TannerGraph,
                             kind: ScheduleKind, ebno: float,
                             parallel: bool) -> tuple[np.ndarray, int]:
    """Simulate frames until the stopping targets are met; returns the
    histogram of first-success iterations (index 0 unused) and the frame count."""
    params = ChannelParams(ebno, design_rate(graph), exp.snr_convention)
    cfg = DecodeConfig(schedule=kind, max_iters=exp.max_iters,
                       kernel=exp.kernel, p=exp.p)
    n = graph.n_vars
    hist = np.zeros(exp.max_iters + 1, dtype=np.int64)
    frames = 0
    failures = 0
    while True:
        chunk = CHUNK_FRAMES
        if frames < exp.min_frames:
            chunk = min(chunk, exp.min_frames - frames)
        if exp.max_frames > 0:
            chunk = min(chunk, exp.max_frames - frames)
        if chunk <= 0:
            break
        llrs = np.empty((chunk, n), dtype=np.float64)
        for i in range(chunk):
            llrs[i] = transmit_all_zero(params, n,
                                        frame_rng(exp.master_seed, frames + i),
                                        exp.kernel.llr_max)
        _, first, _, _, _, _ = decode_frames(graph, llrs, cfg, parallel=parallel)
        for fi in first:
            if fi > 0:
                hist[fi] += 1
            else:
                failures += 1
        frames += chunk
        if frames >= exp.min_frames and failures >= exp.min_errors:
            break
        if exp.max_frames > 0 and frames >= exp.max_frames:
            break
    return hist, frames


def run_experiment(exp: Experiment, parallel: bool = True,
                   log=None) -> list[FerRecord]:
    """Simulate every (schedule, SNR) point and return one FerRecord per
    iteration cap in 1..max_iters, ordered by (schedule, SNR, cap)."""
    graph = load_code(exp.code_path, exp.code_format)
    records: list[FerRecord] = []
    for kind in exp.schedules:
        label = schedule_label(kind, exp.p)
        for ebno in exp.ebno_db:
            hist, frames = _first_success_histogram(exp, graph, kind, ebno, parallel)
            cum = np.cumsum(hist)
            prev = 1.0
            for cap in range(1, exp.max_iters + 1):
                errors = frames - int(cum[cap])
                fer = errors / frames
                assert fer <= prev + 1e-15, "FER(k) must be non-increasing in k"
                prev = fer
                lo, hi = wilson_interval(errors, frames)
                records.append(FerRecord(label, ebno, cap, frames, errors, fer, lo, hi))
            if log is not None:
                final = records[-1]
                log(f"{label} @ {ebno} dB: frames={frames} "
                    f"errors@{exp.max_iters}={final.errors} fer={final.fer:.3e}")
    records.sort(key=lambda r: (r.schedule, r.ebno_db, r.iter_cap))
    return records


CSV_HEADER = "schedule,ebno_db,iter_cap,frames,errors,fer,ci_lo,ci_hi"


def emit_csv(records: list[FerRecord]) -> str:
    """Serialize records to CSV (header always present, stable row order)."""
    rows = [CSV_HEADER]
    for r in sorted(records, key=lambda r: (r.schedule, r.ebno_db, r.iter_cap)):
        rows.append(f"{r.schedule},{r.ebno_db!r},{r.iter_cap},{r.frames},"
                    f"{r.errors},{r.fer!r},{r.ci_lo!r},{r.ci_hi!r}")
    return "\n".join(rows) + "\n"


def parse_csv(text: str) -> list[FerRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"bad or missing CSV header (expected {CSV_HEADER!r})")
    out = []
    for ln in lines[1:]:
        f = ln.split(",")
        if len(f) != 8:
            raise ValueError(f"expected 8 fields, got {len(f)}: {ln!r}")
        out.append(FerRecord(f[0], float(f[1]), int(f[2]), int(f[3]), int(f[4]),
                             float(f[5]), float(f[6]), float(f[7])))
    return out


# ---------------------------------------------------------------------------
# trapping-set divergence diagnostic


@dataclass(frozen=True)
class TrappingRecord:
    ebno_db: float
    frame: int
    ref_unsat_checks: int
    ref_bit_errors: int
    cand_first_success_iter: int
    cand_unsat_trajectory: tuple


TRAPPING_HEADER = ("ebno_db,frame,ref_unsat_checks,ref_bit_errors,"
                   "cand_first_success_iter,cand_unsat_trajectory")


def diagnostics_trapping(exp: Experiment,
                         reference: ScheduleKind = ScheduleKind.LBP,
                         candidate: ScheduleKind = ScheduleKind.NW_ARBP,
                         quick_iters: int = 10,
                         parallel: bool = True,
                         frames_override: np.ndarray | None = None) -> list[TrappingRecord]:
    """Find frames the reference schedule cannot solve within max_iters but
    the candidate solves in fewer than quick_iters iterations; report the
    reference's final unsatisfied-check and bit-error counts and the
    candidate's per-iteration unsatisfied-check trajectory.

    ``frames_override`` bypasses the channel and uses the given LLR rows as
    the frames (handy for hand-constructed error patterns).
    """
    reference = ScheduleKind(reference)
    candidate = ScheduleKind(candidate)
    graph = load_code(exp.code_path, exp.code_format)
    n = graph.n_vars
    ref_cfg = DecodeConfig(schedule=reference, max_iters=exp.max_iters,
                           kernel=exp.kernel, p=exp.p)
    cand_cfg = DecodeConfig(schedule=candidate, max_iters=exp.max_iters,
                            kernel=exp.kernel, p=exp.p)
    out: list[TrappingRecord] = []

    def scan(ebno: float, llrs: np.ndarray, base_index: int) -> None:
        ref_ok, _, _, _, _, _ = decode_frames(graph, llrs, ref_cfg, parallel)
        cand_ok, cand_first, _, _, _, _ = decode_frames(graph, llrs, cand_cfg, parallel)
        for i in range(llrs.shape[0]):
            if ref_ok[i] or not cand_ok[i] or cand_first[i] >= quick_iters:
                continue
            ref_out = decode(graph, llrs[i], ref_cfg)
            cand_out = decode(graph, llrs[i], cand_cfg)
            out.append(TrappingRecord(
                ebno_db=ebno,
                frame=base_index + i,
                ref_unsat_checks=int(ref_out.unsat_per_iter[-1]),
                ref_bit_errors=int(ref_out.bits.sum()),
                cand_first_success_iter=int(cand_out.first_success_iter),
                cand_unsat_trajectory=tuple(int(u) for u in cand_out.unsat_per_iter),
            ))

    if frames_override is not None:
        llrs = np.asarray(frames_override, dtype=np.float64).reshape(-1, n)
        scan(exp.ebno_db[0], llrs, 0)
        return out
    for ebno in exp.ebno_db:
        params = ChannelParams(ebno, design_rate(graph), exp.snr_convention)
        frames = 0
        while frames < exp.min_frames:
            chunk = min(CHUNK_FRAMES, exp.min_frames - frames)
            llrs = np.empty((chunk, n), dtype=np.float64)
            for i in range(chunk):
                llrs[i] = transmit_all_zero(params, n,
                                            frame_rng(exp.master_seed, frames + i),
                                            exp.kernel.llr_max)
            scan(ebno, llrs, frames)
            frames += chunk
    return out


def emit_trapping_csv(records: list[TrappingRecord]) -> str:
    rows = [TRAPPING_HEADER]
    for r in records:
        traj = ";".join(str(u) for u in r.cand_unsat_trajectory)
        rows.append(f"{r.ebno_db!r},{r.frame},{r.ref_unsat_checks},"
                    f"{r.ref_bit_errors},{r.cand_first_success_iter},{traj}")
    return "\n".join(rows) + "\n"
