import itertools
import math

import mpmath
import numpy as np
import pytest

from ldpcsched.codes import QcBaseMatrix, build_graph, expand_qc
from ldpcsched.kernels import (KernelConfig, compute_c2v, compute_c2v_minsum,
                               compute_v2c, init_state, posterior_and_decide,
                               residual_approx, residual_exact, syndrome_ok,
                               unsat_check_count)

SPC3 = build_graph(3, 1, [(0, 0), (0, 1), (0, 2)])  # H = [1 1 1]
TREE = build_graph(3, 2, [(0, 0), (0, 1), (1, 1), (1, 2)])  # H = [[1,1,0],[0,1,1]]


def single_check(deg):
    return build_graph(deg, 1, [(0, j) for j in range(deg)])


def star_variable(deg):
    """Variable 0 shared by `deg` degree-2 checks."""
    pairs = []
    for c in range(deg):
        pairs += [(c, 0), (c, 1 + c)]
    return build_graph(deg + 1, deg, pairs)


def test_init_state_simple():
    s = init_state(SPC3, np.array([1.0, -2.0, 3.0]))
    assert np.array_equal(s.m_vc, [1.0, -2.0, 3.0])
    assert np.array_equal(s.m_cv, [0.0, 0.0, 0.0])


def test_init_state_zero_channel():
    s = init_state(SPC3, np.zeros(3))
    assert not s.m_vc.any() and not s.m_cv.any()


def test_init_state_length_mismatch():
    with pytest.raises(ValueError):
        init_state(SPC3, np.zeros(4))


def test_init_state_spot_check_qc():
    base = QcBaseMatrix(rows=2, cols=4, z=5,
                        entries=[[0, 2, 4, 1], [3, 1, -1, 0]])
    g = expand_qc(base)
    rng = np.random.default_rng(11)
    c = rng.normal(size=g.n_vars)
    s = init_state(g, c)
    for e in rng.integers(0, g.n_edges, size=100):
        assert s.m_vc[e] == c[g.edge_var[e]]


def test_v2c_degree_one_variable():
    s = init_state(SPC3, np.array([1.5, 0.0, 0.0]))
    s.m_cv[:] = [9.0, 0.0, 0.0]  # own edge's incoming message is excluded
    assert compute_v2c(s, SPC3, 0) == 1.5


def test_v2c_forced_arithmetic():
    g = star_variable(3)
    s = init_state(g, np.array([1.0, 0.0, 0.0, 0.0]))
    # edges of var 0 are 0, 2, 4 (one per degree-2 check)
    s.m_cv[g.var_edge_list(0)] = [7.7, 0.5, -2.0]
    assert compute_v2c(s, g, 0) == pytest.approx(1.0 + 0.5 - 2.0)


def test_v2c_brute_force_oracle():
    g = star_variable(6)
    rng = np.random.default_rng(5)
    s = init_state(g, rng.normal(size=g.n_vars))
    s.m_cv[:] = rng.normal(size=g.n_edges)
    for e in g.var_edge_list(0):
        naive = s.channel[0] + sum(s.m_cv[ep] for ep in g.var_edge_list(0) if ep != e)
        assert compute_v2c(s, g, int(e)) == pytest.approx(naive, rel=1e-12)


def test_c2v_degree_two_identity():
    g = single_check(2)
    s = init_state(g, np.zeros(2))
    # the identity 2*atanh(tanh(x/2)) = x loses absolute precision as tanh
    # saturates, so the tolerance is looser for large magnitudes
    for x, tol in ((0.3, 1e-12), (-4.0, 1e-12), (17.0, 1e-7)):
        s.m_vc[:] = [0.0, x]
        assert compute_c2v(s, g, 0) == pytest.approx(x, rel=tol)


def test_c2v_zero_factor():
    s = init_state(SPC3, np.zeros(3))
    s.m_vc[:] = [5.0, 0.0, -3.0]
    assert compute_c2v(s, SPC3, 0) == 0.0


def test_c2v_high_precision_reference():
    s = init_state(SPC3, np.zeros(3))
    s.m_vc[:] = [123.0, 2.0, -1.0]  # first entry excluded for edge 0
    mpmath.mp.dps = 50
    ref = float(2 * mpmath.atanh(mpmath.tanh(1.0) * mpmath.tanh(-0.5)))
    assert compute_c2v(s, SPC3, 0) == pytest.approx(ref, rel=1e-13)


def test_minsum_quoted_example():
    s = init_state(SPC3, np.zeros(3))
    s.m_vc[:] = [0.5, 2.0, 3.0]
    assert np.allclose(compute_c2v_minsum(s, SPC3, 0), [2.0, 0.5, 0.5])


def test_minsum_sign_product():
    s = init_state(SPC3, np.zeros(3))
    s.m_vc[:] = [0.5, -2.0, 3.0]
    assert np.allclose(compute_c2v_minsum(s, SPC3, 0), [-2.0, 0.5, -0.5])


def test_minsum_tie_lowest_index():
    g = single_check(2)
    s = init_state(g, np.zeros(2))
    s.m_vc[:] = [1.0, 1.0]
    assert np.allclose(compute_c2v_minsum(s, g, 0), [1.0, 1.0])


def test_minsum_exhaustive_rule_application():
    # independent scalar oracle applying the quoted rule edge by edge
    rng = np.random.default_rng(17)
    for deg in range(2, 9):
        g = single_check(deg)
        s = init_state(g, np.zeros(deg))
        for _ in range(50):
            s.m_vc[:] = np.round(rng.normal(size=deg) * 4, 3)
            got = compute_c2v_minsum(s, g, 0)
            for e in range(deg):
                others = [i for i in range(deg) if i != e]
                mag = min(abs(s.m_vc[i]) for i in others)
                sign = 1.0
                for i in others:
                    sign *= 1.0 if s.m_vc[i] >= 0 else -1.0
                assert got[e] == pytest.approx(sign * mag, rel=1e-15), (deg, e)


def test_minsum_sign_of_zero_is_plus():
    s = init_state(SPC3, np.zeros(3))
    s.m_vc[:] = [0.0, -2.0, 3.0]
    out = compute_c2v_minsum(s, SPC3, 0)
    # sign(0) = + : the others for edge 0 have signs (-, +), so the output is
    # -2.0; with a sign(0) = - convention it would come out +2.0
    assert out[0] == -2.0
    assert out[1] == 0.0 and out[2] == 0.0


def test_residual_exact_converged_edge():
    g = single_check(2)
    s = init_state(g, np.zeros(2))
    s.m_vc[:] = [1.2, 0.7]
    s.m_cv[0] = compute_c2v(s, g, 0)
    assert residual_exact(s, g, 0) == 0.0


def test_residual_exact_fresh_init():
    g = single_check(2)
    s = init_state(g, np.array([0.9, -1.4]))
    assert residual_exact(s, g, 0) == pytest.approx(1.4, rel=1e-12)
    assert residual_exact(s, g, 1) == pytest.approx(0.9, rel=1e-12)


def test_residual_propagation_linearity():
    # after propagating a c->v message with residual r*, the induced change
    # in any downstream variable-to-check message equals r* exactly
    rng = np.random.default_rng(23)
    base = QcBaseMatrix(rows=2, cols=4, z=3,
                        entries=[[0, 2, -1, 1], [1, -1, 0, 2]])
    g = expand_qc(base)
    s = init_state(g, rng.normal(size=g.n_vars))
    s.m_vc[:] = rng.normal(size=g.n_edges)
    s.m_cv[:] = rng.normal(size=g.n_edges)
    checked = 0
    for e_star in range(g.n_edges):
        v = int(g.edge_var[e_star])
        if g.var_degree(v) < 2:
            continue
        r_star = residual_exact(s, g, e_star)
        downstream = [int(e) for e in g.var_edge_list(v) if e != e_star]
        before = [compute_v2c(s, g, e) for e in downstream]
        old = s.m_cv[e_star]
        s.m_cv[e_star] = compute_c2v(s, g, e_star)
        after = [compute_v2c(s, g, e) for e in downstream]
        for b, a in zip(before, after):
            assert abs(a - b) == pytest.approx(r_star, abs=1e-9)
        s.m_cv[e_star] = old
        checked += 1
    assert checked > 10


def test_residual_approx_zero_when_shadow_current():
    s = init_state(SPC3, np.zeros(3))
    s.m_vc[:] = [0.5, 2.0, 3.0]
    shadow = compute_c2v_minsum(s, SPC3, 0).copy()
    assert np.allclose(residual_approx(s, SPC3, 0, shadow), 0.0)


def test_residual_approx_fresh_init():
    g = single_check(2)
    s = init_state(g, np.array([0.5, 2.0]))
    shadow = np.zeros(2)
    assert np.allclose(residual_approx(s, g, 0, shadow), [2.0, 0.5])


def test_residual_approx_scalar_oracle():
    rng = np.random.default_rng(31)
    g = single_check(5)
    s = init_state(g, np.zeros(5))
    for _ in range(20):
        s.m_vc[:] = rng.normal(size=5) * 3
        shadow = rng.normal(size=5)
        got = residual_approx(s, g, 0, shadow)
        ms = compute_c2v_minsum(s, g, 0)
        for e in range(5):
            assert got[e] == pytest.approx(abs(ms[e] - shadow[e]), rel=1e-15)


def test_posterior_channel_only():
    g = build_graph(2, 1, [(0, 0), (0, 1)])
    s = init_state(g, np.array([1.0, -2.0]))
    bits, post = posterior_and_decide(s, g)
    assert list(bits) == [0, 1]
    assert np.allclose(post, [1.0, -2.0])


def test_posterior_tie_decides_zero():
    g = build_graph(2, 1, [(0, 0), (0, 1)])
    s = init_state(g, np.array([1.0, -1.0]))
    s.m_cv[:] = [-1.0, 1.0]  # posteriors exactly 0
    bits, post = posterior_and_decide(s, g)
    assert np.all(post == 0.0)
    assert list(bits) == [0, 0]


def test_posterior_summation_oracle():
    rng = np.random.default_rng(41)
    g = star_variable(4)
    s = init_state(g, rng.normal(size=g.n_vars))
    s.m_cv[:] = rng.normal(size=g.n_edges)
    bits, post = posterior_and_decide(s, g)
    for v in range(g.n_vars):
        naive = s.channel[v] + sum(s.m_cv[e] for e in g.var_edge_list(v))
        assert post[v] == pytest.approx(naive, rel=1e-12)
        assert bits[v] == (0 if naive >= 0 else 1)


def test_syndrome_all_zero_and_single_one():
    assert syndrome_ok(np.zeros(3, dtype=np.uint8), SPC3)
    assert not syndrome_ok(np.array([1, 0, 0], dtype=np.uint8), SPC3)


def test_syndrome_exhaustive_gf2_oracle():
    H = np.array([[1, 1, 0], [0, 1, 1]])
    for bits in itertools.product((0, 1), repeat=3):
        b = np.array(bits, dtype=np.uint8)
        expect = not np.any(H @ b % 2)
        assert syndrome_ok(b, TREE) == expect
        assert unsat_check_count(b, TREE) == int(np.sum(H @ b % 2))


def test_c2v_symmetry_and_degradation():
    rng = np.random.default_rng(53)
    for deg in range(2, 7):
        g = single_check(deg)
        s = init_state(g, np.zeros(deg))
        for _ in range(100):
            vals = rng.normal(size=deg) * 3
            s.m_vc[:] = vals
            m0 = compute_c2v(s, g, 0)
            # negating one included message negates the output
            s.m_vc[1] = -vals[1]
            assert compute_c2v(s, g, 0) == pytest.approx(-m0, rel=1e-12, abs=1e-12)
            s.m_vc[1] = vals[1]
            # output magnitude never exceeds the smallest included magnitude
            assert abs(m0) <= min(abs(v) for v in vals[1:]) + 1e-12


def test_minsum_dominates_exact():
    rng = np.random.default_rng(67)
    graphs = {deg: single_check(deg) for deg in range(2, 9)}
    for _ in range(10_000):
        deg = int(rng.integers(2, 9))
        g = graphs[deg]
        s = init_state(g, np.zeros(deg))
        s.m_vc[:] = rng.normal(size=deg) * 5
        ms = compute_c2v_minsum(s, g, 0)
        for e in range(deg):
            # 1e-7 absorbs the atanh(tanh(.)) round-trip error at the
            # degree-2 equality case
            assert abs(ms[e]) >= abs(compute_c2v(s, g, int(e))) - 1e-7


def test_kernel_outputs_clipped():
    cfg = KernelConfig()
    g = single_check(3)
    s = init_state(g, np.full(3, 1e9))  # channel clipped at init
    assert np.all(np.abs(s.channel) <= cfg.llr_max)
    assert np.all(np.abs(s.m_vc) <= cfg.llr_max)
    s.m_vc[:] = [38.0, 38.0, 38.0]
    s.m_cv[:] = [38.0, 38.0, 38.0]
    for e in range(3):
        assert abs(compute_c2v(s, g, e)) <= cfg.llr_max
        assert abs(compute_v2c(s, g, e)) <= cfg.llr_max
    assert np.all(np.abs(compute_c2v_minsum(s, g, 0)) <= cfg.llr_max)
    # saturated tanh product stays finite thanks to the atanh clamp
    assert np.isfinite(compute_c2v(s, g, 0))


def brute_force_marginals(channel):
    """Exact bitwise posterior LLRs of the 2-codeword tree code by direct
    enumeration over all length-3 vectors satisfying H."""
    H = np.array([[1, 1, 0], [0, 1, 1]])
    num = np.zeros(3)
    den = np.zeros(3)
    for bits in itertools.product((0, 1), repeat=3):
        b = np.array(bits)
        if np.any(H @ b % 2):
            continue
        w = math.exp(float(np.sum(channel * (1 - b))))  # weight e^{C_j} per 0-bit
        for j in range(3):
            if b[j] == 0:
                num[j] += w
            else:
                den[j] += w
    return np.log(num / den)


def test_tree_code_bp_is_exact():
    rng = np.random.default_rng(71)
    for _ in range(100):
        channel = rng.normal(size=3) * 2
        s = init_state(TREE, channel)
        for _ in range(5):  # flooding to fixpoint, no stopping rule
            for e in range(TREE.n_edges):
                s.m_vc[e] = compute_v2c(s, TREE, e)
            new_cv = [compute_c2v(s, TREE, e) for e in range(TREE.n_edges)]
            s.m_cv[:] = new_cv
        _, post = posterior_and_decide(s, TREE)
        expect = brute_force_marginals(channel)
        assert np.allclose(post, expect, atol=1e-9)
