"""Acceptance criteria, one test each. Every test prints a single
``[PASS]``/``[FAIL]`` line with the measured values, then asserts the verdict.
Wall-clock limits are part of each criterion."""

import itertools
import json
import time

import numpy as np
import pytest

from majlogic.adversary import adversarial_guarantee_check
from majlogic.analytic import (
    conditional_ber_general,
    dependence_factor,
    gos_ber_bounds,
    misdecode_prob,
    misdecode_prob_vn,
    subset_array,
)
from majlogic.bounds import (
    ExpanderParams,
    GuaranteeQuery,
    correctable_weight,
    optimal_alpha_total,
    theorem2_capacity,
    theorem3_capacity,
    vi_trajectory_bound,
    zero_crossing,
)
from majlogic.cli import main
from majlogic.codes import TannerGraph, build_pg, check_expansion, combine, encoder_from_parity, girth
from majlogic.errors import DomainError
from majlogic.fault import GOS, Reliable, Table
from majlogic.sim import (
    AllZero,
    AlternateComplement,
    BitFlip,
    ChannelParams,
    ExperimentConfig,
    OSMAJ,
    RandomCodewords,
    osmaj_decode,
    run_ber_experiment,
)

from oracles import exhaustive_ber


@pytest.fixture
def report(capsys):
    def _report(num: int, title: str, ok: bool, detail: str, elapsed: float, limit: float):
        passed = bool(ok) and elapsed <= limit
        with capsys.disabled():
            tag = "PASS" if passed else "FAIL"
            print(f"\n[{tag}] criterion {num:2d}: {title} | {detail} | {elapsed:.3g}s (limit {limit:g}s)")
        assert passed, detail

    return _report


def test_c01_subset_array_rows(report):
    t = time.perf_counter()
    rows = subset_array(2, 4).tolist()
    el = time.perf_counter() - t
    expected = [[1, 2, 3, 4], [1, 3, 2, 4], [1, 4, 2, 3], [2, 3, 1, 4], [2, 4, 1, 3], [3, 4, 1, 2]]
    report(1, "subset array (2,4)", rows == expected, f"rows={rows}", el, 1e-3)


def test_c02_uniform_vector_matches_binomial_form(report):
    t = time.perf_counter()
    worst = 0.0
    for gamma, rho, p, eps in itertools.product((3, 4, 5, 16, 17), (3, 5, 17), (0.0, 1e-3, 1e-2, 1e-1, 0.5),
                                                (0.0, 1e-3, 1e-2, 0.5)):
        worst = max(worst, abs(misdecode_prob(p, [eps] * gamma, gamma, rho) - misdecode_prob_vn(p, eps, gamma, rho)))
    el = time.perf_counter() - t
    report(2, "general vs uniform-failure miscorrection", worst <= 1e-12, f"max |diff|={worst:.3e} (tol 1e-12)", el, 1.0)


def test_c03_conditional_ber_exact(report):
    t = time.perf_counter()
    g = build_pg(1)  # gamma = rho = 3, girth 6, n = 7
    assert (g.gamma, g.rho, g.n, girth(g)) == (3, 3, 7, 6)
    basis = encoder_from_parity(g)
    words = [combine(basis, np.array(c)) for c in itertools.product((0, 1), repeat=basis.shape[0])]
    rng = np.random.default_rng(3)
    cases = []
    for a, b in [(0, 0), (1, 2), (3, 7), (5, 0), (6, 6)]:
        cases.append((GOS(0.3), np.stack([words[a], words[b]]), 0.05))
    for memory in (1, 2):
        table = {format(i, f"0{2 * memory}b"): float(rng.random() * 0.4) for i in range(1 << (2 * memory))}
        for _ in range(3):
            W = np.stack([words[int(k)] for k in rng.integers(0, len(words), memory)])
            cases.append((Table(memory, table), W, 0.06))
    worst = max(abs(conditional_ber_general(g, W, m, p) - exhaustive_ber(g, W, m, p, coupled=False)) for m, W, p in cases)
    el = time.perf_counter() - t
    report(3, "conditional BER vs exhaustive enumeration (GOS, table M=1,2)", worst <= 1e-10,
           f"{len(cases)} windows, max |diff|={worst:.3e} (tol 1e-10)", el, 60.0)


def test_c04_dependence_factor(report):
    t = time.perf_counter()
    F = dependence_factor(1e-3, 1e-2, 5, 5)
    b = gos_ber_bounds(1e-3, 1e-2, 5, 5)
    el = time.perf_counter() - t
    report(4, "dependence factor (5,5), p=1e-3, eps=1e-2 below 1/70", F < 1 / 70,
           f"F={F:.5g} (upper/lower={1 / F:.4g}), lower={b.lower:.4g}, upper={b.upper:.4g}", el, 1.0)


def test_c05_simulation_within_bounds(report):
    t = time.perf_counter()
    g = build_pg(2)
    eps, trials = 1e-2, 10**6
    ok = True
    parts = []
    for p in (1e-2, 5e-2):
        bnd = gos_ber_bounds(p, eps, g.gamma, g.rho)
        zero = run_ber_experiment(
            ExperimentConfig(g, GOS(eps), ChannelParams(p), AllZero(), OSMAJ(), trials, seed=500), threads=None
        )
        z_in = zero.ber + zero.ci95_ber >= bnd.lower and zero.ber - zero.ci95_ber <= bnd.upper
        try:
            cfg = ExperimentConfig(g, GOS(eps), ChannelParams(p), AlternateComplement(), OSMAJ(), trials, seed=500)
            alt = run_ber_experiment(cfg, threads=None)
            a_in = alt.ber + alt.ci95_ber >= bnd.lower and alt.ber - alt.ci95_ber <= bnd.upper
            order = zero.ber <= alt.ber + alt.ci95_ber + zero.ci95_ber
            alt_txt = f"alt={alt.ber:.4g}"
        except DomainError as exc:
            a_in = order = False
            alt_txt = f"alt unavailable ({exc})"
        ok = ok and z_in and a_in and order
        parts.append(
            f"p={p:g}: [{bnd.lower:.4g}, {bnd.upper:.4g}] zero={zero.ber:.4g}+-{zero.ci95_ber:.2g} {alt_txt}"
        )
    el = time.perf_counter() - t
    report(5, "OS-MAJ GOS simulation inside analytic bounds on PG(2,4)", ok, "; ".join(parts), el, 600.0)


def test_c06_weight_two_all_corrected(report):
    t = time.perf_counter()
    g = build_pg(2)
    bad = 0
    count = 0
    for pat in itertools.combinations(range(g.n), 2):
        r = np.zeros(g.n, dtype=np.uint8)
        r[list(pat)] = 1
        bad += bool(osmaj_decode(g, r, Reliable()).any())
        count += 1
    el = time.perf_counter() - t
    report(6, "reliable OS-MAJ corrects every weight-2 pattern on PG(2,4)", count == 210 and bad == 0,
           f"{count} patterns, {bad} failures", el, 1.0)


def test_c07_expander_capacity_and_contraction(report):
    t = time.perf_counter()
    exact = all(
        theorem2_capacity(GuaranteeQuery(ExpanderParams(a, 0.125, n))) == 3 * a * n / 8
        for a, n in [(0.1, 1000), (0.25, 64), (0.5, 8)]
    )
    exact = exact and theorem2_capacity(GuaranteeQuery(ExpanderParams(0.1, 0.125, 1000))) == pytest.approx(37.5)
    slacks = np.linspace(0, 0.125, 102)[1:-1]
    contracts = all(
        vi_trajectory_bound(100.0, 0.0, s, i + 1) < vi_trajectory_bound(100.0, 0.0, s, i)
        for s in slacks
        for i in range(1, 10)
    )
    el = time.perf_counter() - t
    report(7, "expander capacity 3an/8 at slack 1/8; trajectory contracts", exact and contracts,
           f"anchor={exact}, contraction over {len(slacks)} slacks={contracts}", el, 1.0)


def test_c08_girth_capacity(report):
    t = time.perf_counter()
    w12 = correctable_weight(theorem3_capacity(12, 12, 0))
    w8 = correctable_weight(theorem3_capacity(8, 8, 0))
    el = time.perf_counter() - t
    report(8, "girth capacity weights", (w12, w8) == (7, 1), f"(12,12)->{w12}, (8,8)->{w8}", el, 1e-3)


def test_c09_expansion_optimization(report):
    t = time.perf_counter()
    a8 = optimal_alpha_total(8).alpha_total
    zc = zero_crossing(8)
    vals = [optimal_alpha_total(r).alpha_total for r in (8, 10, 12, 16)]
    mono = all(x >= y for x, y in zip(vals, vals[1:]))
    el = time.perf_counter() - t
    report(9, "optimal correctable fraction", a8 > 0.01 and 0.007 <= zc <= 0.013 and mono,
           f"alpha_total(8)={a8:.5g}, zero crossing={zc:.5g}, by rho={[round(v, 6) for v in vals]}", el, 5.0)


def test_c10_gos_static_soundness(report):
    t = time.perf_counter()
    g = build_pg(2)
    cfg = ExperimentConfig(g, GOS(1.0), ChannelParams(0.0), RandomCodewords(10), BitFlip(5, True), 10**6, seed=10)
    st = run_ber_experiment(cfg, threads=None)
    el = time.perf_counter() - t
    report(10, "no injected errors without channel errors", st.bit_errors == 0 and st.trials_run == 10**6,
           f"{st.trials_run} trials, {st.bit_errors} bit errors", el, 60.0)


def test_c11_adversarial_verifier(report):
    t = time.perf_counter()
    # six variables on six checks; variables 0 and 1 share two checks (a 4-cycle)
    poor = TannerGraph.from_var_adj([[0, 1, 2], [0, 1, 3], [0, 4, 5], [1, 4, 5], [2, 3, 4], [2, 3, 5]])
    bad = adversarial_guarantee_check(poor, 2)
    # seven points on seven lines, every pair of lines meeting once
    lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
    fano = TannerGraph.from_var_adj([[c for c, line in enumerate(lines) if v in line] for v in range(7)])
    expands = check_expansion(fano, 1 / 7, 0.75).expands
    good = adversarial_guarantee_check(fano, 1)
    el = time.perf_counter() - t
    ok = bad.status == "counterexample" and expands and good.proven
    report(11, "adversarial verifier on toy graphs", ok,
           f"poor toy w=2: {bad.status} {bad.pattern}; Fano expands={expands}, w=1: {good.status}", el, 300.0)


def test_c12_determinism_across_workers(report, tmp_path):
    t = time.perf_counter()
    code = tmp_path / "pg4.alist"
    assert main(["code", "build", "--family", "pg", "--s", "2", "--out", str(code)]) == 0
    toy = tmp_path / "toy.alist"
    assert main(["code", "build", "--family", "ag", "--s", "1", "--out", str(toy)]) == 0
    table = tmp_path / "table.json"
    table.write_text(json.dumps({"00001111": 0.3, "11110000": 0.3, "default": 0.01}))
    sim = ["sim", "ber", "--code", str(code), "--p", "1e-2:5e-2:3", "--trials", "30000", "--seed", "9"]
    commands = [
        sim + ["--model", "gos:0.01"],
        sim + ["--model", "vn:0.01", "--decoder", "bitflip:4", "--policy", "random"],
        sim + ["--model", "gos:0.1", "--decoder", "bitflip:3", "--first-iter-reliable", "--policy", "repeat",
               "--codeword-seed", "2"],
        sim + ["--model", f"table:{table}", "--policy", "random", "--min-errors", "0"],
        ["sim", "verify", "--code", str(code), "--weight", "2"],
        ["sim", "verify", "--code", str(toy), "--weight", "2"],
        ["bounds", "expander", "--rho", "8"],
        ["bounds", "expander", "--rho", "12", "--cxor-frac", "0.003"],
        ["bounds", "girth", "--gamma", "12", "--girth", "12", "--cxor", "0", "--compare-osmaj"],
    ]
    mismatched = []
    for k, cmd in enumerate(commands):
        outs = []
        for run, threads in enumerate(("1", "8", "1")):
            out = tmp_path / f"c{k}_{run}.out"
            assert main(cmd + ["--threads", threads, "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        if len(set(outs)) != 1:
            mismatched.append(" ".join(cmd[:2]))
    el = time.perf_counter() - t
    report(12, "byte-identical sim and bounds outputs at 1 and 8 workers", not mismatched,
           f"{len(commands)} commands, mismatched={mismatched}", el, 300.0)
