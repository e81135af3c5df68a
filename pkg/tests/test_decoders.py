import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtrap.codes import hypergraph_product, lift, random_qc_ldpc, stabilizer_space
from qtrap.decoders import (
    DecodeOutcome,
    DecoderConfig,
    DecoderKind,
    backend_name,
    bf_decode,
    channel_bias,
    decode,
    diversity_decode,
    minsum_decode,
    minsum_scheduled_decode,
    select_outcome,
    set_backend,
    tsbf_decode,
    tsbf_random_tiebreak_decode,
)
from qtrap.gf2 import BinaryMatrix
from qtrap.tanner import from_matrix, x_check_neighborhood, z_graph
from qtrap.trapset import generator_combinations, induced_subgraph

ALL_KINDS = list(DecoderKind)


def cfg_for(kind, **kw):
    c = DecoderConfig(kind, rng_seed=0 if kind is DecoderKind.TSBF_RANDOM_TIEBREAK else None, **kw)
    return c.with_channel(0.05)


def error_on(code, qubits):
    e = np.zeros(code.n, dtype=np.uint8)
    e[list(qubits)] = 1
    return e


def reference_bf(h: np.ndarray, sigma: np.ndarray, max_iters: int):
    """Line-by-line bit flipping: all flips of an iteration use the same counts."""
    h = h.astype(np.int64)
    deg = h.sum(axis=0)
    x = np.zeros(h.shape[1], dtype=np.int64)
    states = [x.copy()]
    for _ in range(max_iters):
        beta = (h @ x + sigma) % 2
        if not beta.any():
            return states, True
        alpha = h.T @ beta
        flip = alpha > deg / 2
        if not flip.any():
            # a fixed point still counts as one iteration
            states.append(x.copy())
            return states, False
        x = x ^ flip
        states.append(x.copy())
    return states, not ((h @ x + sigma) % 2).any()


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            DecoderConfig(max_iters=0)
        with pytest.raises(ValueError):
            DecoderConfig(w=0)
        with pytest.raises(ValueError):
            DecoderConfig(edge_bias=[1.0, np.nan])
        with pytest.raises(ValueError):
            DecoderConfig(default_bias=float("inf"))

    def test_channel_bias(self):
        assert channel_bias(0.5) == 0
        assert channel_bias(0.05) == pytest.approx(np.log(19))
        with pytest.raises(ValueError):
            channel_bias(0)

    def test_with_channel_keeps_explicit_bias(self):
        c = DecoderConfig(DecoderKind.MINSUM, default_bias=1.0)
        assert c.with_channel(0.1).default_bias == 1.0
        assert DecoderConfig(DecoderKind.BF).with_channel(0.1).default_bias is None

    def test_edge_bias_length_checked(self, rep_hp):
        g = z_graph(rep_hp)
        cfg = DecoderConfig(DecoderKind.MINSUM, edge_bias=np.ones(g.edge_count + 1))
        with pytest.raises(ValueError):
            minsum_decode(g, np.zeros(2, np.uint8), cfg)

    def test_minsum_needs_bias(self, rep_hp):
        with pytest.raises(ValueError):
            minsum_decode(z_graph(rep_hp), np.zeros(2, np.uint8), DecoderConfig(DecoderKind.MINSUM))

    def test_syndrome_length_checked(self, rep_hp):
        for kind in ALL_KINDS:
            with pytest.raises(ValueError):
                decode(z_graph(rep_hp), np.zeros(3, np.uint8), cfg_for(kind))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_zero_syndrome_gives_zero(backend, hp34, kind):
    g = z_graph(hp34)
    out = decode(g, np.zeros(g.check_count, np.uint8), cfg_for(kind))
    assert out.converged and out.iters_used == 0 and out.weight == 0


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_weight_two_qubit_on_small_code(rep_hp, kind):
    g = z_graph(rep_hp)
    e = error_on(rep_hp, [4])
    out = decode(g, rep_hp.h_z.mul_vec(e), cfg_for(kind, w=0.75))
    assert out.converged
    assert stabilizer_space(rep_hp).contains(out.estimate ^ e)


def test_degree_one_qubits_are_indistinguishable(rep_hp):
    """Qubits 0/1 (and 2/3) share a syndrome and differ by a logical, so no
    decoder can return a stabilizer residual for both members of a pair."""
    space = stabilizer_space(rep_hp)
    for a, b in ((0, 1), (2, 3)):
        ea, eb = error_on(rep_hp, [a]), error_on(rep_hp, [b])
        assert np.array_equal(rep_hp.h_z.mul_vec(ea), rep_hp.h_z.mul_vec(eb))
        assert not space.contains(ea ^ eb)


class TestBitFlip:
    def test_matches_reference_transcription(self, backend):
        rng = np.random.default_rng(99)
        codes = [
            hypergraph_product(lift(random_qc_ldpc(2, 3, 3, rng)), lift(random_qc_ldpc(2, 3, 3, rng))),
            hypergraph_product(BinaryMatrix.from_dense(rng.integers(0, 2, (3, 5))), BinaryMatrix.from_dense(rng.integers(0, 2, (4, 4)))),
        ]
        cases = 0
        while cases < 10_000:
            code = codes[cases % 2]
            g = z_graph(code)
            e = (rng.random(code.n) < rng.uniform(0.02, 0.3)).astype(np.uint8)
            sigma = code.h_z.mul_vec(e)
            out = bf_decode(g, sigma, DecoderConfig(DecoderKind.BF, max_iters=30, record_trace=True))
            states, ok = reference_bf(code.h_z.dense, sigma.astype(np.int64), 30)
            k = out.trace.shape[0]
            assert np.array_equal(out.trace, np.array(states[:k], dtype=np.uint8))
            if out.status in ("converged", "stalled", "max_iters"):
                assert k == len(states)
                assert out.converged == ok
            else:
                # a repeated state: the reference keeps cycling through it
                assert any(np.array_equal(states[k - 1], s) for s in states[: k - 1])
            cases += 1

    def test_all_cc_error_oscillates(self, hp34):
        g = z_graph(hp34)
        for r in (0, 17, 123):
            nb = x_check_neighborhood(hp34, r)
            e = error_on(hp34, nb.cc)
            out = bf_decode(g, hp34.h_z.mul_vec(e), DecoderConfig(DecoderKind.BF, record_trace=True))
            assert out.status == "oscillating" and not out.converged
            residuals = [set(np.flatnonzero(t ^ e)) for t in out.trace]
            assert residuals[0] == nb.cc and residuals[1] == nb.vv and residuals[2] == nb.cc

    def test_fixed_point_stalls(self):
        g = from_matrix(BinaryMatrix.from_dense([[1, 1], [1, 0]]))
        out = bf_decode(g, np.array([0, 1], np.uint8))
        assert out.status == "stalled" and out.iters_used == 1 and out.weight == 0

    def test_pair_of_leaves_oscillates(self):
        g = from_matrix(BinaryMatrix.from_dense([[1, 1]]))
        out = bf_decode(g, np.array([1], np.uint8))
        assert out.status == "oscillating" and out.iters_used == 2


class TestTsAwareBitFlip:
    def test_two_cc_errors_converge_to_generator(self, hp34):
        g = z_graph(hp34)
        for r in (0, 5, 222):
            nb = x_check_neighborhood(hp34, r)
            assert (len(nb.vv), len(nb.cc)) == (4, 3)
            e = error_on(hp34, sorted(nb.cc)[:2])
            out = tsbf_decode(g, hp34.h_z.mul_vec(e), DecoderConfig(DecoderKind.TSBF, record_trace=True))
            assert out.converged and out.iters_used <= 3
            assert np.array_equal(out.estimate ^ e, hp34.h_x.row(r))
            # first phase moves VV nodes only
            assert set(np.flatnonzero(out.trace[1])) == nb.vv

    def test_four_generator_combination(self, hp34):
        g = z_graph(hp34)
        n2 = hp34.provenance["h2"].cols
        space = stabilizer_space(hp34)
        square = [c for c in generator_combinations(hp34, 4)
                  if len({r // n2 for r in c}) == 2 and len({r % n2 for r in c}) == 2]
        for combo in square[:: len(square) // 25]:
            sub = induced_subgraph(hp34, combo)
            e = error_on(hp34, [q for s in combo for q in sub.exclusive_cc[s]])
            out = tsbf_decode(g, hp34.h_z.mul_vec(e))
            assert out.converged and out.iters_used <= 3
            resid = out.estimate ^ e
            assert resid.any() and space.contains(resid)

    def test_even_degree_pattern_stalls(self, even_degree_hp):
        code = even_degree_hp
        g = z_graph(code)
        assert set(g.var_degree[: code.n_vv]) == {4} and set(g.var_degree[code.n_vv:]) == {6}
        e = error_on(code, [0, 1, 2, 6, 7])
        out = tsbf_decode(g, code.h_z.mul_vec(e))
        assert out.status == "stalled"
        assert out.weight == 0 and code.h_z.mul_vec(e).any()

    def test_random_tiebreak_escapes(self, even_degree_hp):
        code = even_degree_hp
        g = z_graph(code)
        e = error_on(code, [0, 1, 2, 6, 7])
        sigma = code.h_z.mul_vec(e)
        space = stabilizer_space(code)
        for seed in range(64):
            out = tsbf_random_tiebreak_decode(g, sigma, DecoderConfig(DecoderKind.TSBF_RANDOM_TIEBREAK, rng_seed=seed))
            assert out.converged and out.iters_used <= 4
            assert space.contains(out.estimate ^ e)

    def test_tiebreak_needs_seed(self, rep_hp):
        with pytest.raises(ValueError):
            tsbf_random_tiebreak_decode(z_graph(rep_hp), np.zeros(2, np.uint8), DecoderConfig(DecoderKind.TSBF_RANDOM_TIEBREAK))

    @given(st.integers(0, 2**31), st.integers(0, 2**31))
    def test_tiebreak_seed_determinism(self, even_degree_hp, seed, err_seed):
        code = even_degree_hp
        g = z_graph(code)
        e = np.random.default_rng(err_seed).integers(0, 2, code.n).astype(np.uint8)
        cfg = DecoderConfig(DecoderKind.TSBF_RANDOM_TIEBREAK, rng_seed=seed, record_trace=True)
        a = tsbf_random_tiebreak_decode(g, code.h_z.mul_vec(e), cfg)
        b = tsbf_random_tiebreak_decode(g, code.h_z.mul_vec(e), cfg)
        assert np.array_equal(a.trace, b.trace) and a.status == b.status


class TestMinSum:
    def test_check_message_sign_and_min(self):
        g = from_matrix(BinaryMatrix.from_dense([[1, 1, 1]]))
        sigma = np.array([1], np.uint8)
        # variable 0 sees -(min of the other two incoming magnitudes)
        weak = DecoderConfig(DecoderKind.MINSUM, w=1.0, edge_bias=[2.0, 2.5, 4.0], max_iters=1, record_trace=True)
        strong = weak.replace(edge_bias=np.array([2.0, 1.5, 4.0]))
        assert minsum_decode(g, sigma, weak).trace[1].tolist() == [1, 0, 0]
        assert minsum_decode(g, sigma, strong).trace[1].tolist() == [0, 1, 0]

    def test_first_decision_uses_mean_bias(self):
        g = from_matrix(BinaryMatrix.from_dense([[1, 0], [1, 1]]))
        cfg = DecoderConfig(DecoderKind.MINSUM, edge_bias=[-3.0, 1.0, 2.0])
        out = minsum_decode(g, np.array([1, 1], np.uint8), cfg)
        assert out.converged and out.iters_used == 0 and out.estimate.tolist() == [1, 0]

    def test_weight_two_qubit_hp(self, backend, rep_hp):
        g = z_graph(rep_hp)
        cfg = DecoderConfig(DecoderKind.MINSUM, w=0.75).with_channel(0.05)
        e = error_on(rep_hp, [4])
        out = minsum_decode(g, rep_hp.h_z.mul_vec(e), cfg)
        assert out.converged and out.iters_used == 1 and not (out.estimate ^ e).any()

    def test_symmetric_leaves_tie(self, rep_hp):
        """A degree-1 qubit next to a twin gets total LLR exactly zero."""
        g = z_graph(rep_hp)
        cfg = DecoderConfig(DecoderKind.MINSUM, w=0.75, max_iters=5).with_channel(0.05)
        out = minsum_decode(g, rep_hp.h_z.mul_vec(error_on(rep_hp, [0])), cfg)
        assert not out.converged and out.weight == 0

    @given(st.floats(0.01, 100), st.integers(0, 2**31))
    def test_bias_scaling_keeps_decisions(self, hp34, c, seed):
        g = z_graph(hp34)
        rng = np.random.default_rng(seed)
        bias = rng.uniform(0.5, 4.0, g.edge_count)
        e = (rng.random(hp34.n) < 0.04).astype(np.uint8)
        sigma = hp34.h_z.mul_vec(e)
        base = DecoderConfig(DecoderKind.MINSUM, w=0.6, edge_bias=bias, max_iters=15, clip=1e12, record_trace=True)
        a = minsum_decode(g, sigma, base)
        b = minsum_decode(g, sigma, base.replace(edge_bias=bias * c))
        assert np.array_equal(a.trace, b.trace)

    def test_messages_stay_finite_with_clip(self, hp34):
        g = z_graph(hp34)
        e = error_on(hp34, range(0, hp34.n, 3))
        cfg = DecoderConfig(DecoderKind.MINSUM, w=1.0, max_iters=200, default_bias=30.0, record_trace=True)
        out = minsum_decode(g, hp34.h_z.mul_vec(e), cfg)
        assert out.trace.shape == (out.iters_used + 1, hp34.n)


class TestScheduledMinSum:
    def test_escapes_where_flooding_fails(self, hp34):
        g = z_graph(hp34)
        flood = DecoderConfig(DecoderKind.MINSUM, w=0.5, max_iters=50).with_channel(0.05)
        sched = flood.replace(kind=DecoderKind.MINSUM_SCHEDULED)
        for r in (0, 40, 299):
            e = error_on(hp34, x_check_neighborhood(hp34, r).cc)
            sigma = hp34.h_z.mul_vec(e)
            assert not minsum_decode(g, sigma, flood).converged
            out = minsum_scheduled_decode(g, sigma, sched)
            assert out.converged and stabilizer_space(hp34).contains(out.estimate ^ e)

    def test_without_cc_block_repeats_flooding(self, hp34):
        g_all_vv = from_matrix(hp34.h_z)
        rng = np.random.default_rng(4)
        for _ in range(20):
            e = (rng.random(hp34.n) < 0.05).astype(np.uint8)
            sigma = hp34.h_z.mul_vec(e)
            cfg = DecoderConfig(DecoderKind.MINSUM, w=0.75, max_iters=12, record_trace=True, default_bias=2.0)
            f = minsum_decode(g_all_vv, sigma, cfg)
            # every edge is VV: odd iterations update, even ones repeat the last check pass
            s = minsum_scheduled_decode(g_all_vv, sigma, cfg.replace(kind=DecoderKind.MINSUM_SCHEDULED, max_iters=23))
            assert s.converged == f.converged
            assert np.array_equal(s.trace[1], f.trace[1])
            for k in range(1, f.trace.shape[0] - 1):
                if 2 * k < s.trace.shape[0]:
                    assert np.array_equal(s.trace[2 * k], f.trace[k + 1])
                if 2 * k + 1 < s.trace.shape[0]:
                    assert np.array_equal(s.trace[2 * k + 1], f.trace[k + 1])


class TestBackends:
    def test_python_and_compiled_agree(self, tanner_lp):
        from qtrap.decoders import available_backends

        if "cython" not in available_backends():
            pytest.skip("compiled kernels not built")
        g = z_graph(tanner_lp)
        rng = np.random.default_rng(8)
        cfgs = [
            DecoderConfig(DecoderKind.BF, max_iters=40),
            DecoderConfig(DecoderKind.TSBF, max_iters=40),
            DecoderConfig(DecoderKind.MINSUM, w=0.42, max_iters=25).with_channel(0.04),
            DecoderConfig(DecoderKind.MINSUM_SCHEDULED, w=0.75, max_iters=25, edge_bias=rng.uniform(1, 4, g.edge_count)),
        ]
        prev = backend_name()
        try:
            for _ in range(15):
                e = (rng.random(tanner_lp.n) < 0.04).astype(np.uint8)
                sigma = tanner_lp.h_z.mul_vec(e)
                for cfg in cfgs:
                    cfg = cfg.replace(record_trace=True)
                    set_backend("python")
                    a = decode(g, sigma, cfg)
                    set_backend("cython")
                    b = decode(g, sigma, cfg)
                    assert a.status == b.status and a.iters_used == b.iters_used
                    assert np.array_equal(a.trace, b.trace)
        finally:
            set_backend(prev)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            set_backend("fortran")


def _outcome(weight, converged, n=8):
    est = np.zeros(n, np.uint8)
    est[:weight] = 1
    return DecodeOutcome(est, converged, 1, "converged" if converged else "max_iters")


class TestDiversity:
    def test_only_one_converges(self):
        out = select_outcome([_outcome(2, False), _outcome(5, True)])
        assert out.member == 1 and out.weight == 5

    def test_lightest_wins(self):
        out = select_outcome([_outcome(5, True), _outcome(3, True), _outcome(3, True)])
        assert out.member == 1 and out.weight == 3

    def test_none_converge(self):
        out = select_outcome([_outcome(4, False), _outcome(1, False)])
        assert not out.converged and out.member == 0 and out.weight == 4

    def test_empty(self, rep_hp):
        with pytest.raises(ValueError):
            select_outcome([])
        with pytest.raises(ValueError):
            diversity_decode(z_graph(rep_hp), np.zeros(2, np.uint8), [])

    def test_single_member_equals_member(self, hp34):
        g = z_graph(hp34)
        rng = np.random.default_rng(3)
        cfg = DecoderConfig(DecoderKind.MINSUM_SCHEDULED, w=0.75, max_iters=20).with_channel(0.05)
        for _ in range(10):
            sigma = hp34.h_z.mul_vec((rng.random(hp34.n) < 0.05).astype(np.uint8))
            a, b = decode(g, sigma, cfg), diversity_decode(g, sigma, [cfg])
            assert np.array_equal(a.estimate, b.estimate) and a.converged == b.converged and b.member == 0

    def test_prefers_lighter_member(self, hp34):
        g = z_graph(hp34)
        e = error_on(hp34, x_check_neighborhood(hp34, 0).cc)
        sigma = hp34.h_z.mul_vec(e)
        members = [
            DecoderConfig(DecoderKind.MINSUM, w=0.5, max_iters=30).with_channel(0.05),
            DecoderConfig(DecoderKind.MINSUM_SCHEDULED, w=0.5, max_iters=30).with_channel(0.05),
            DecoderConfig(DecoderKind.MINSUM, w=0.75, max_iters=30).with_channel(0.05),
        ]
        outs = [decode(g, sigma, m) for m in members]
        best = diversity_decode(g, sigma, members)
        assert best.converged
        assert best.weight == min(o.weight for o in outs if o.converged)
