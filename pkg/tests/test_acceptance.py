"""Acceptance criteria, each at its stated tolerance. Every test records one PASS/FAIL line."""

import math
from fractions import Fraction as F
from itertools import product

import numpy as np

from lcilimit import (CASE_A, CASE_A_SYM, CASE_B1, CASE_B2, BlockOrder, Instance, RngConfig,
                      blocks_analysis, classify_case, compute_emax, lc_blocks_length, lci_bruteforce, lci_length,
                      m_closed, m_lp_oracle, sample_limit, simulate_zn, truncate_alphabet,
                      uniform_instance)
from lcilimit.exact import composition_value, compositions
from lcilimit.harness import ks_critical, ks_two_sample
from lcilimit.sampler import sample_limit_blocks

from conftest import (BOTH_TIGHT_EQUAL, BOTH_TIGHT_SPLIT, X_LIMITED, inst, random_instance,
                      random_word, record_acceptance)


def _verdict(label, ok, detail):
    record_acceptance(label, bool(ok), detail)
    assert ok, detail


def test_criterion_1_exact_analysis_values():
    checks = []
    rep = classify_case(inst(X_LIMITED))
    checks.append(compute_emax(inst(X_LIMITED))[2] == F(3, 8)
                  and (rep.e_max, rep.case, rep.I) == (F(3, 8), CASE_A, (1, 2)))
    rep = classify_case(inst(BOTH_TIGHT_EQUAL))
    checks.append(compute_emax(inst(BOTH_TIGHT_EQUAL))[2] == F(1, 3)
                  and (rep.e_max, rep.case) == (F(1, 3), CASE_B1))
    rep = classify_case(inst(BOTH_TIGHT_SPLIT))
    checks.append(compute_emax(inst(BOTH_TIGHT_SPLIT))[2] == F(4, 15)
                  and (rep.e_max, rep.case) == (F(4, 15), CASE_B2)
                  and rep.constants == {"s": F(2, 15), "t": F(2, 15)})
    _verdict("criterion 1", all(checks), f"worked examples matched: {checks}")


def _two_letter_instances(count=500, seed=2):
    # odd denominator: 1/2 is never an endpoint; one in five draws forces pX_1 = pY_1
    rng = np.random.default_rng(seed)
    out = []
    d = 997
    for _ in range(count):
        a, b = int(rng.integers(1, d)), int(rng.integers(1, d))
        if rng.random() < 0.2:
            b = a
        out.append(Instance.from_lists([F(a, d), F(d - a, d)], [F(b, d), F(d - b, d)]))
    return out


def _bullets(inst, swap_conditions):
    a, b = inst.pX.probs[0], inst.pY.probs[0]
    if a == b:
        return {CASE_B1}, max(a, 1 - a)
    straddles = min(a, b) < F(1, 2) < max(a, b)
    if straddles != swap_conditions:
        return {CASE_A, CASE_A_SYM}, max(min(a, b), min(1 - a, 1 - b))
    return {CASE_B2}, a * b + (1 - a) * (1 - b)


def _agreement(swap):
    bad = 0
    for I in _two_letter_instances():
        cases, e = _bullets(I, swap)
        rep = classify_case(I)
        if rep.case not in cases or compute_emax(I)[2] != e:
            bad += 1
    return bad


def test_criterion_2_two_letter_rule_as_printed():
    bad = _agreement(swap=False)
    _verdict("criterion 2", bad == 0,
             f"{bad}/500 instances disagree with the three-bullet rule as printed")


def test_criterion_2_companion_two_letter_rule_corrected():
    bad = _agreement(swap=True)
    _verdict("criterion 2 (corrected companion)", bad == 0,
             f"{bad}/500 disagree once the two 1/2-conditions are exchanged")


def test_criterion_3_dp_against_oracles():
    rng = np.random.default_rng(3)
    bad_brute = 0
    for _ in range(500):
        m = int(rng.integers(1, 4))
        x = random_word(rng, m, int(rng.integers(0, 9)))
        y = random_word(rng, m, int(rng.integers(0, 9)))
        bad_brute += lci_length(x, y) != lci_bruteforce(x, y)
    bad_comp = 0
    for _ in range(100):
        x = random_word(rng, 3, int(rng.integers(1, 9)))
        y = random_word(rng, 3, int(rng.integers(1, 9)))
        best = max(composition_value(x, y, lx, ly)
                   for lx in compositions(len(x), 3) for ly in compositions(len(y), 3))
        bad_comp += best != lci_length(x, y)
    _verdict("criterion 3", bad_brute == 0 and bad_comp == 0,
             f"brute-force mismatches {bad_brute}/500, composition mismatches {bad_comp}/100")


def test_criterion_4_functional_closed_form_vs_lp():
    rng = np.random.default_rng(4)
    worst = 0.0
    for pair in (BOTH_TIGHT_EQUAL, BOTH_TIGHT_SPLIT):
        rep = classify_case(inst(pair))
        for k in range(1000):
            nx, ny = np.zeros(rep.l), np.zeros(rep.l)
            scale = 10.0 ** rng.uniform(-2, 2)
            for i in rep.I0:
                nx[i], ny[i] = rng.normal(0, scale, size=2)
            worst = max(worst, abs(float(m_closed(rep, (nx, ny))) - m_lp_oracle(rep, (nx, ny))))
    _verdict("criterion 4", worst <= 1e-8, f"max |closed - LP| over 2x1000 draws = {worst:.2e}")


def test_criterion_5_single_active_letter_mean():
    target = -math.sqrt(0.24) / math.sqrt(math.pi)
    I = Instance.from_lists(["3/5", "2/5"], ["3/5", "2/5"])
    rep = classify_case(I)
    lim = sample_limit(rep, reps=100_000, rng=RngConfig(5))
    z = simulate_zn(I, 20_000, 2000, RngConfig(6), rep)
    ok_lim = abs(lim.mean() - target) <= 3 * lim.std_error()
    ok_z = abs(z.mean() - target) <= 3 * z.std_error()
    _verdict("criterion 5", ok_lim and ok_z,
             f"target {target:.5f}; limit {lim.mean():.5f} (SE {lim.std_error():.5f}); "
             f"Z_n {z.mean():.5f} (SE {z.std_error():.5f})")


def test_criterion_6_explicit_block_gaussian():
    rep = blocks_analysis(Instance.from_lists(["1/3", "2/3"], ["1/4", "3/4"]), (1, 2))
    res = sample_limit_blocks(rep, reps=100_000, rng=RngConfig(7))
    sd, target = float(np.std(res.samples, ddof=1)), math.sqrt(2) / 3
    _verdict("criterion 6", abs(sd / target - 1) <= 0.03,
             f"std {sd:.5f} vs {target:.5f} (rel. error {abs(sd / target - 1):.4f})")


def _convergence_ks(r):
    I = uniform_instance(2)
    rep = classify_case(I)
    lim = sample_limit(rep, 4096, r, 10_000, RngConfig(8))
    z_big = simulate_zn(I, 20_000, 2000, RngConfig(9), rep)
    z_small = simulate_zn(I, 500, 2000, RngConfig(10), rep)
    d_big = ks_two_sample(z_big.samples, lim.samples).statistic
    d_small = ks_two_sample(z_small.samples, lim.samples).statistic
    return lim.mean(), d_big, d_small


def test_criterion_7_distributional_convergence():
    mean, d_big, d_small = _convergence_ks(64)
    _verdict("criterion 7", d_big <= 0.08 and d_big < d_small,
             f"r=64: limit mean {mean:.4f}; KS at n=20000: {d_big:.4f} (gate 0.08); "
             f"at n=500: {d_small:.4f}")


def test_criterion_7_companion_fine_grid():
    # same gate with the lambda-grid refined to 1/1024; isolates the grid-max bias at r=64
    mean, d_big, d_small = _convergence_ks(1024)
    _verdict("criterion 7 (r=1024 companion)", d_big <= 0.08 and d_big < d_small,
             f"r=1024: limit mean {mean:.4f}; KS at n=20000: {d_big:.4f}; at n=500: {d_small:.4f}")


def test_criterion_8_block_invariance_of_the_mean():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = int(rng.integers(2, 5))
        I = random_instance(rng, m)
        extra = rng.integers(1, m + 1, size=int(rng.integers(0, 4))).tolist()
        alpha = tuple(rng.permutation(list(range(1, m + 1)) + extra).tolist())
        rep = blocks_analysis(I, alpha)     # raises on any e_max or active-set mismatch
        assert rep.e_max == classify_case(I).e_max
    bad = 0
    for _ in range(200):
        m = int(rng.integers(1, 5))
        x = random_word(rng, m, int(rng.integers(0, 40)))
        y = random_word(rng, m, int(rng.integers(0, 40)))
        bad += lc_blocks_length(x, y, BlockOrder.identity(m).alpha) != lci_length(x, y)
    _verdict("criterion 8", bad == 0,
             f"50 block orders kept e_max exactly; identity-order mismatches {bad}/200")


def test_criterion_9_permutation_invariance():
    I = uniform_instance(2)
    a = sample_limit_blocks(blocks_analysis(I, (1, 2)), reps=10_000, rng=RngConfig(12))
    b = sample_limit_blocks(blocks_analysis(I, (2, 1)), reps=10_000, rng=RngConfig(13))
    ks = ks_two_sample(a.samples, b.samples)
    crit = ks_critical(10_000, 10_000, 0.001)
    _verdict("criterion 9", ks.statistic < crit,
             f"KS {ks.statistic:.4f} vs critical {crit:.4f}")


def _truncation_ks(px, py, seeds):
    full = classify_case(Instance.from_lists(px, py))
    m, bucketed = truncate_alphabet(px, py)
    cut = classify_case(bucketed)
    a = sample_limit(full, reps=10_000, rng=RngConfig(seeds[0]))
    b = sample_limit(cut, reps=10_000, rng=RngConfig(seeds[1]))
    return m, full, cut, ks_two_sample(a.samples, b.samples).statistic


def test_criterion_10_truncation_consistency():
    crit = ks_critical(10_000, 10_000, 0.001)
    # a dominant first letter in both marginals: X-limited, one active letter
    dom_x = [F(1, 2)] + [F(1, 38)] * 19
    dom_y = [F(11, 20)] + [F(9, 380)] * 19
    m1, f1, c1, d1 = _truncation_ks(dom_x, dom_y, (14, 15))
    # two tied leading letters and a heavy third X letter: both-tight with nonzero s_X,
    # so the cut must carry the bucket masses into the constants
    tie_x = [F(3, 10), F(3, 10), F(8, 25)] + [F(8, 100) / 17] * 17
    tie_y = [F(3, 10), F(3, 10), F(1, 20), F(1, 10)] + [F(1, 4) / 16] * 16
    m2, f2, c2, d2 = _truncation_ks(tie_x, tie_y, (16, 17))
    same = all((f.case, f.I, f.e_max, f.constants) == (c.case, c.I, c.e_max, c.constants)
               for f, c in ((f1, c1), (f2, c2)))
    _verdict("criterion 10", same and d1 < crit and d2 < crit,
             f"dominant letter: cut m={m1}, KS {d1:.4f}; tied letters: cut m={m2}, "
             f"KS {d2:.4f}; critical {crit:.4f}")
