"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line
in the terminal summary (see ``conftest.py``)."""

import json
import time

import networkx as nx
import numpy as np
import pytest

from conftest import array_code, data_path
from qtrap.cli import DATA_DIR, ExperimentConfig, build_spec, load_code, main
from qtrap.codes import (
    QcMatrix,
    QcPolynomial,
    circulant_star,
    code_parameters,
    hypergraph_product,
    lift,
    lifted_product,
    load_qc,
    random_qc_ldpc,
)
from qtrap.decoders import DecoderConfig, DecoderKind, decode
from qtrap.gf2 import BinaryMatrix
from qtrap.simulate import estimate_ler, logical_failure
from qtrap.tanner import z_graph
from qtrap.trapset import (
    STALLED,
    base_code,
    classical_degree_profile,
    classical_ts_replicas,
    classify_ts,
    generator_combinations,
    induced_subgraph,
    lp_ts_copies,
    replica_degree_profile,
)

BF = DecoderConfig(DecoderKind.BF, max_iters=100)
TSBF = DecoderConfig(DecoderKind.TSBF, max_iters=100)


def detail(record_property, text):
    record_property("detail", text)
    print(text)


def count_kinds(code, qubits, mask):
    nv = nc = 0
    for k, q in enumerate(qubits):
        if mask >> k & 1:
            if q < code.n_vv:
                nv += 1
            else:
                nc += 1
    return nv, nc


@pytest.mark.criterion(1)
def test_css_validity(record_property):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    for _ in range(200):
        a = rng.integers(0, 2, size=(rng.integers(1, 9), rng.integers(2, 13)), dtype=np.uint8)
        b = rng.integers(0, 2, size=(rng.integers(1, 9), rng.integers(2, 13)), dtype=np.uint8)
        code = hypergraph_product(BinaryMatrix.from_dense(a), BinaryMatrix.from_dense(b))
        assert (code.h_x @ code.h_z.T).is_zero()
    for _ in range(50):
        gamma = int(rng.integers(1, 8))

        def rand_w():
            r, c = rng.integers(1, 4), rng.integers(2, 6)
            return QcMatrix(tuple(
                tuple(QcPolynomial(rng.integers(0, gamma, size=rng.integers(0, 2)), gamma) for _ in range(c))
                for _ in range(r)), gamma)

        code = lifted_product(rand_w(), rand_w())
        assert (code.h_x @ code.h_z.T).is_zero()
    elapsed = time.perf_counter() - t0
    detail(record_property, f"200 HP + 50 LP codes satisfy H_X H_Z^T = 0 in {elapsed:.1f} s")
    assert elapsed < 30


@pytest.mark.criterion(2)
def test_worked_examples(record_property):
    h = lift(load_qc(data_path("ex1.qc")))
    assert h.dense.tolist() == [
        [1, 0, 0, 1, 1, 0],
        [0, 1, 1, 0, 0, 1],
        [0, 1, 1, 0, 0, 1],
        [1, 0, 0, 1, 1, 0],
    ]
    # the graph labels put the all-ones factor on the X-check side
    lp = lifted_product(load_qc(data_path("ex2_w2.qc")), load_qc(data_path("ex2_w1.qc")))
    assert lp.h_x.dense[6:8, 0:2].tolist() == [[0, 1], [1, 0]]
    assert lp.h_z.dense[8:10, 22:24].tolist() == [[0, 1], [1, 0]]
    x1 = QcPolynomial.monomial(1, 2)
    assert circulant_star(x1) == x1
    assert np.array_equal(x1.circulant().T, x1.circulant())
    rep = hypergraph_product(BinaryMatrix.from_dense([[1, 1]]), BinaryMatrix.from_dense([[1, 1]]))
    assert code_parameters(rep) == (5, 1)
    detail(record_property, "lifted 4x6 matrix bit-exact; labelled circulants and x^1 self-conjugacy at lift 2; [[5,1]]")


@pytest.mark.criterion(3)
def test_single_generator_structure(record_property):
    violations = checked = 0
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        h1 = lift(random_qc_ldpc(3, 4, 5, rng))
        h2 = lift(random_qc_ldpc(4, 3, 5, rng))
        code = hypergraph_product(h1, h2)
        n2 = h2.cols
        for r in range(code.h_x.rows):
            i, b = divmod(r, n2)
            sub = induced_subgraph(code, [r])
            checked += 1
            ok = (
                len(sub.cc_members) == h2.col_support(b).size
                and len(sub.vv_members) == h1.row_support(i).size
                and not sub.structure_violations()
                and sub.pairing_holds()
            )
            violations += not ok
    detail(record_property, f"{checked} single-generator subgraphs over 10 codes, {violations} violations")
    assert violations == 0


def _bf_oracle(code, gens_limit=None):
    """Exhaustive BF classification of single-generator subgraphs."""
    rows = range(code.h_x.rows) if gens_limit is None else range(0, code.h_x.rows, gens_limit)
    g = z_graph(code)
    cfg = BF.replace(record_trace=True)
    problems = []
    n_sub = n_pat = 0
    for r in rows:
        sub = induced_subgraph(code, [r])
        assert len(sub) <= 16
        res = classify_ts(sub, BF, code, keep_patterns=True)
        n_sub += 1
        n_pat += res.patterns
        vv, cc = set(sub.vv_members), set(sub.cc_members)
        e = np.zeros(code.n, np.uint8)
        e[list(cc)] = 1
        out = decode(g, code.h_z.mul_vec(e), cfg)
        resid = [set(np.flatnonzero(row ^ e)) for row in out.trace]
        alternates = all(s in (vv, cc) for s in resid) and all(a != b for a, b in zip(resid, resid[1:]))
        if not (out.status == "oscillating" and out.iters_used <= 100 and alternates):
            problems.append(f"generator {r}: all-CC error gave {out.status}")
        a_min = len(vv) // 2 + 1
        b_max = len(cc) // 2
        for mask in range(1, res.patterns):
            nv, nc = count_kinds(code, sub.qubits, mask)
            if nv >= a_min and nc < b_max and res.pattern_status[mask] < STALLED:
                problems.append(f"generator {r}: pattern {mask} corrected")
    return n_sub, n_pat, problems


@pytest.mark.criterion(4)
def test_bf_dynamics(record_property, hp34, even_degree_hp):
    arr = hypergraph_product(array_code(5, 3, 5), array_code(5, 3, 5))
    total_sub = total_pat = 0
    problems = []
    for code in (hp34, even_degree_hp, arr):
        s, p, probs = _bf_oracle(code)
        total_sub += s
        total_pat += p
        problems += probs
    detail(record_property, f"{total_sub} subgraphs, {total_pat} patterns enumerated; "
                            f"all-CC oscillation and threshold patterns trap BF; {len(problems)} exceptions")
    assert not problems, problems[:5]


def _product_permutation(code, h1_perm, h2_perm):
    """Qubit and check permutations of an HP code from factor automorphisms."""
    (c1, v1), (c2, v2) = h1_perm, h2_perm
    h1, h2 = code.provenance["h1"], code.provenance["h2"]
    m2, n2 = h2.shape
    qubit = np.concatenate([
        (v1[:, None] * n2 + v2[None, :]).ravel(),
        code.n_vv + (c1[:, None] * m2 + c2[None, :]).ravel(),
    ])
    xchk = (c1[:, None] * n2 + v2[None, :]).ravel()
    zchk = (v1[:, None] * m2 + c2[None, :]).ravel()
    return qubit, xchk, zchk


def _is_automorphism(h, rows, cols):
    d = h.dense
    moved = np.zeros_like(d)
    moved[np.ix_(rows, cols)] = d
    return np.array_equal(moved, d)


# (3,5)-regular quasi-cyclic code of girth 8 at lift 15
GIRTH8_EXPONENTS = [[0, 0, 0, 0, 0], [0, 8, 9, 2, 5], [0, 7, 12, 13, 6]]
GIRTH8_LIFT = 15
PATTERN_BUDGET = 1 << 20


def _qc_shift(rows, cols, gamma, s):
    """Check and variable permutations for the same cyclic shift in every block."""
    def perm(blocks):
        return np.array([b * gamma + (x + s) % gamma for b in range(blocks) for x in range(gamma)])
    return perm(rows), perm(cols)


def _spread(items, k):
    if k >= len(items):
        return list(items)
    return [items[round(t * (len(items) - 1) / (k - 1))] for t in range(k)] if k > 1 else items[:k]


@pytest.mark.slow
@pytest.mark.criterion(5)
def test_phased_bit_flip_corrects_small_combinations(record_property):
    gamma = GIRTH8_LIFT
    h = lift(QcMatrix.from_exponents(GIRTH8_EXPONENTS, gamma))
    assert set(h.dense.sum(axis=0)) == {3} and set(h.dense.sum(axis=1)) == {5}
    rows, cols = np.nonzero(h.dense)
    girth = nx.girth(nx.Graph((("c", int(r)), ("v", int(c))) for r, c in zip(rows, cols)))
    assert girth >= 8
    code = hypergraph_product(h, h)
    n2 = h.cols

    shifts = [_qc_shift(3, 5, gamma, s) for s in range(gamma)]
    for p1 in shifts[::4]:
        for p2 in shifts[::5]:
            qubit, xchk, zchk = _product_permutation(code, p1, p2)
            assert _is_automorphism(code.h_x, xchk, qubit) and _is_automorphism(code.h_z, zchk, qubit)

    def moved(r, s, t):
        i, b = divmod(r, n2)
        return int(shifts[s][0][i]) * n2 + int(shifts[t][1][b])

    def canon(combo):
        best = None
        for anchor in combo:
            i, b = divmod(anchor, n2)
            s, t = (-i) % gamma, (-b) % gamma
            key = tuple(sorted(moved(r, s, t) for r in combo))
            best = key if best is None or key < best else best
        return best

    singles, same_row, same_col = set(), set(), set()
    for combo in generator_combinations(code, 2):
        key = canon(combo)
        if len(combo) == 1:
            singles.add(key)
        elif combo[0] // n2 == combo[1] // n2:
            same_row.add(key)
        else:
            same_col.add(key)
    assert (len(singles), len(same_row), len(same_col)) == (15, 90, 75)

    pair_patterns = 1 << max(len(induced_subgraph(code, min(c))) for c in (same_row, same_col))
    room = (PATTERN_BUDGET - len(singles) * (1 << len(induced_subgraph(code, min(singles))))) // pair_patterns
    k_row = room * len(same_row) // (len(same_row) + len(same_col))
    chosen = sorted(singles) + _spread(sorted(same_row), k_row) + _spread(sorted(same_col), room - k_row)

    patterns = 0
    failures = []
    for combo in chosen:
        sub = induced_subgraph(code, combo)
        res = classify_ts(sub, TSBF, code, budget=PATTERN_BUDGET, local_radius=2)
        patterns += res.patterns
        if not res.corrects_all:
            failures.append((combo, res.counts))
    assert patterns <= PATTERN_BUDGET
    detail(record_property, f"girth-{girth} (3,5) product code n={code.n}: all {len(singles)} single-generator orbits "
                            f"and {len(chosen) - len(singles)} of {len(same_row) + len(same_col)} pair orbits "
                            f"exhaustively decoded, {patterns} patterns, {len(failures)} not corrected up to a stabilizer")
    assert not failures, failures[:3]


@pytest.mark.criterion(6)
def test_tie_break_escapes_even_degree_stall(record_property, even_degree_hp):
    code = even_degree_hp
    sub = induced_subgraph(code, [0])
    assert (len(sub.vv_members), len(sub.cc_members)) == (6, 4)
    g = z_graph(code)
    e = np.zeros(code.n, np.uint8)
    e[[0, 1, 2, 6, 7]] = 1
    sigma = code.h_z.mul_vec(e)
    plain = decode(g, sigma, TSBF)
    assert plain.status == "stalled" and (code.h_z.mul_vec(plain.estimate) ^ sigma).any()
    iters = []
    for seed in range(64):
        out = decode(g, sigma, DecoderConfig(DecoderKind.TSBF_RANDOM_TIEBREAK, max_iters=10, rng_seed=seed))
        assert out.converged and out.iters_used <= 10
        assert not logical_failure(code, e, out.estimate)
        iters.append(out.iters_used)
    detail(record_property, f"plain phased BF stalls after {plain.iters_used} iterations; "
                            f"tie-break converges for 64/64 seeds, max {max(iters)} iterations")


@pytest.mark.criterion(7)
def test_lifted_copies_and_replicas(record_property, ex2_lp, tanner_lp, tanner_w):
    base = base_code(ex2_lp)
    gamma = ex2_lp.provenance["gamma"]
    for bg in range(base.h_x.rows):
        ref = induced_subgraph(base, [bg], check_girth=False)
        copies = lp_ts_copies(ex2_lp, bg)
        assert len(copies) == gamma
        checks = [set(c.internal_checks) for c in copies]
        assert not checks[0] & checks[1]
        for c in copies:
            assert (len(c.vv_members), len(c.cc_members)) == (len(ref.vv_members), len(ref.cc_members))
            assert c.degree_profile() == ref.degree_profile()

    ts = json.loads(open(data_path("tanner_155_ts53.json")).read())["sets"][0]["variables"]
    h2 = lift(tanner_w)
    ref = classical_degree_profile(h2, ts)
    hp = hypergraph_product(BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]]), h2)
    hp_reps = classical_ts_replicas(hp, ts, 2)
    assert len(hp_reps) == 3 and len(set(hp_reps)) == 3
    assert all(replica_degree_profile(hp, r, 2) == ref for r in hp_reps)
    n1 = tanner_w.cols
    lp_reps = classical_ts_replicas(tanner_lp, ts, 2)
    assert len(lp_reps) == 31 * n1 and len(set(lp_reps)) == len(lp_reps)
    assert all(replica_degree_profile(tanner_lp, r, 2) == ref for r in lp_reps)
    ex_reps = classical_ts_replicas(ex2_lp, [0, 3], 2)
    assert len(ex_reps) == gamma * ex2_lp.provenance["w1"].cols
    detail(record_property, f"{gamma} isomorphic copies per base X-check; replicas: 3 (HP, n1=3), "
                            f"{len(lp_reps)} (LP, 31 x {n1}), {len(ex_reps)} (small LP) with matching degree multisets")


@pytest.mark.slow
@pytest.mark.criterion(8)
def test_tanner_lp_error_rates(record_property):
    cfg = ExperimentConfig.from_toml((DATA_DIR / "tanner_lp.toml").read_text())
    code = load_code(cfg.code, DATA_DIR)
    assert (code.n, code.k) == (1054, 140)
    baseline, proposed = (build_spec(d, code, DATA_DIR) for d in cfg.decoders)
    (b05,) = estimate_ler(code, baseline, [0.05], 10_000, master_seed=cfg.seed, max_failures=None)
    (b03,) = estimate_ler(code, baseline, [0.03], 20_000, master_seed=cfg.seed, max_failures=None)
    (d03,) = estimate_ler(code, proposed, [0.03], 20_000, master_seed=cfg.seed, max_failures=None)
    ratio = b05.ler / 0.12
    detail(record_property, f"(a) baseline LER at p=0.05: {b05.ler:.4f} ({ratio:.2f} x reference); "
                            f"(b) p=0.03: ensemble {d03.ler:.5f} vs baseline {b03.ler:.5f} "
                            f"over {d03.trials} shared-seed trials")
    assert 1 / 3 <= ratio <= 3
    assert d03.ler < b03.ler


@pytest.mark.criterion(9)
def test_parallel_runs_are_byte_identical(record_property, tmp_path, capsys):
    args = ["simulate", "--config", "tanner_lp.toml", "--p", "0.05", "--p", "0.04", "--trials", "250",
            "--max-failures", "0", "--seed", "31"]
    outs = []
    for jobs in (1, 8):
        path = tmp_path / f"j{jobs}.csv"
        assert main(args + ["--jobs", str(jobs), "--output", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    detail(record_property, f"--jobs 1 and --jobs 8 CSVs identical ({len(outs[0])} bytes)")
    assert outs[0] == outs[1]
