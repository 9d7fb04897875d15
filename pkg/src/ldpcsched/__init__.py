"""Belief-propagation LDPC decoding under informed dynamic schedules.

Seven message-passing schedules (flooding, layered, residual-ordered and
their min-sum-residual / node-wise / batched variants) over quasi-cyclic or
alist-described codes, with a reproducible Monte-Carlo FER harness.
"""

from .channel import (ChannelParams, frame_rng, llr_from_sample,
                      transmit_all_zero, transmit_codeword)
from .codes import (CodeFormatError, QcBaseMatrix, TannerGraph, build_graph,
                    expand_qc, load_alist, load_code, parse_qc,
                    shipped_code_path, validate_for_decoding, write_alist,
                    write_qc)
from .kernels import (KernelConfig, LlrState, compute_c2v, compute_c2v_minsum,
                      compute_v2c, init_state, posterior_and_decide,
                      residual_approx, residual_exact, syndrome_ok,
                      unsat_check_count)
from .rqueue import ResidualQueue
from .schedules import (DecodeConfig, DecodeOutcome, ScheduleKind, decode,
                        decode_flooding, decode_frames, decode_lbp,
                        decode_nw_rbp, decode_parallel_nw_arbp, decode_rbp,
                        schedule_label)
from .sim import (Experiment, FerRecord, TrappingRecord, diagnostics_trapping,
                  emit_csv, emit_trapping_csv, parse_csv, run_experiment,
                  wilson_interval)

__version__ = "0.1.0"
