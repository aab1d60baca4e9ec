import math
from fractions import Fraction as F

import numpy as np
import pytest

from lcilimit import (BlockOrder, RngConfig, blocks_analysis, classify_case, grid_J, grid_K,
                      sample_limit, uniform_instance)
from lcilimit.errors import LciError, PointNotInJ, PointNotInK
from lcilimit.harness import ks_two_sample
from lcilimit.sampler import (BrownianGrid, _paths, eval_za, eval_zb, increments,
                              read_samples_csv, sample_brownian, sample_limit_blocks,
                              write_samples_csv)

from conftest import BOTH_TIGHT_EQUAL, BOTH_TIGHT_SPLIT, X_LIMITED, inst


def _within_sigmas(p, g, inc, k=4.0):
    cov = np.diag(p) - np.outer(p, p)
    emp = inc.T @ inc / inc.shape[0]
    sd = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / inc.shape[0])
    return np.all(np.abs(emp - cov) <= k * sd + 1e-15)


@pytest.mark.parametrize("p", [[0.5, 0.5], [0.2, 0.3, 0.5], [0.1, 0.05, 0.6, 0.25]])
def test_increment_covariance_full_alphabet(p):
    p = np.array(p)
    g = np.random.default_rng(1).standard_normal((100_000, p.size))
    inc = increments(p, g, 1)
    assert _within_sigmas(p, g, inc)
    assert np.abs(inc.sum(axis=1)).max() < 1e-12


def test_increment_covariance_letter_subset():
    # two letters of a larger alphabet: marginal covariance still diag(p) - p p^T
    p = np.array([0.3, 0.25])
    g = np.random.default_rng(2).standard_normal((100_000, 2))
    assert _within_sigmas(p, g, increments(p, g, 1))


def test_two_letter_paths_mirror():
    G = _paths(np.array([0.3, 0.7]), 50, 4, np.random.default_rng(3))
    assert np.allclose(G[..., 0], -G[..., 1], atol=1e-12)
    assert np.all(G[:, 0, :] == 0)


def test_brownian_interpolation():
    path = sample_brownian(uniform_instance(3), 10, RngConfig(4))
    assert path.value("X", 2, 0.3) == pytest.approx(path.GX[3, 1])
    mid = 0.5 * (path.GY[3, 0] + path.GY[4, 0])
    assert path.value("Y", 1, 0.35) == pytest.approx(mid)
    with pytest.raises(LciError):
        sample_brownian(uniform_instance(2), 1, RngConfig(0))


def _linear(N, slopes_x, slopes_y):
    t = np.arange(N + 1)[:, None] / N
    return BrownianGrid(N, t * np.array(slopes_x), t * np.array(slopes_y))


def test_eval_za_hand_built():
    rep = classify_case(inst(X_LIMITED))
    path = _linear(8, [2.0, -1.0, 5.0], [0.0, 0.0, 0.0])
    # slot 1 covers [0, 1/2], slot 2 covers [1/2, 1]; slot 3 is inactive
    assert eval_za(path, rep, (F(1, 2), F(1, 2), 0)) == pytest.approx(0.5)
    assert eval_za(path, rep, (1, 0, 0)) == pytest.approx(2.0)
    assert eval_za(_linear(8, [0] * 3, [0] * 3), rep, (F(1, 4), F(3, 4), 0)) == 0
    assert eval_za(path, rep, (0, 1, 0)) == pytest.approx(-1.0)   # on the boundary of J
    with pytest.raises(PointNotInJ):
        eval_za(path, rep, (F(1, 2), 0, F(1, 2)))


def test_eval_zb_hand_built():
    rep = classify_case(uniform_instance(2))
    path = _linear(4, [1.0, 3.0], [-2.0, 0.5])
    # sums: X = 1/2 + 3/2 = 2, Y = -1 + 1/4 = -3/4; m = min of the two here
    assert eval_zb(path, rep, (F(1, 2), F(1, 2)), (F(1, 2), F(1, 2))) == pytest.approx(-0.75)
    rep = classify_case(inst(BOTH_TIGHT_SPLIT))
    with pytest.raises(PointNotInK):
        eval_zb(path, rep, (F(1, 2), F(1, 2), 0), (F(1, 2), F(1, 2), 0))


def test_eval_zb_flat_path_is_zero():
    rep = classify_case(inst(BOTH_TIGHT_EQUAL))
    path = _linear(6, [0] * 4, [0] * 4)
    for lx, ly in zip(*grid_K(rep, 3).arrays()):
        assert eval_zb(path, rep, lx, ly) == 0


def test_samples_are_grid_maxima():
    rep = classify_case(uniform_instance(2))
    N, r, size = 32, 8, 3
    res = sample_limit(rep, N, r, size, RngConfig(5))
    GX = _paths(np.array([0.5, 0.5]), N, size, RngConfig(5).child(0, 0).generator())
    GY = _paths(np.array([0.5, 0.5]), N, size, RngConfig(5).child(0, 1).generator())
    g = grid_K(rep, r)
    for k in range(size):
        path = BrownianGrid(N, GX[k], GY[k])
        best = max(eval_zb(path, rep, lx, ly) for lx, ly in zip(g.lam_x, g.lam_y))
        assert res.samples[k] == pytest.approx(best, abs=1e-12)


def test_reproducible_and_seed_sensitive():
    rep = classify_case(inst(X_LIMITED))
    a = sample_limit(rep, 64, 8, 100, RngConfig(6)).samples
    b = sample_limit(rep, 64, 8, 100, RngConfig(6)).samples
    c = sample_limit(rep, 64, 8, 100, RngConfig(7)).samples
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_case_a_ignores_the_y_stream():
    rep = classify_case(inst(X_LIMITED))
    a = sample_limit(rep, 64, 8, 100, RngConfig(6), y_rng=RngConfig(1)).samples
    b = sample_limit(rep, 64, 8, 100, RngConfig(6), y_rng=RngConfig(2)).samples
    assert np.array_equal(a, b)


@pytest.mark.parametrize("pair", [X_LIMITED, BOTH_TIGHT_EQUAL])
def test_finer_nested_grid_never_lowers(pair):
    rep = classify_case(inst(pair))
    coarse = sample_limit(rep, 64, 4, 80, RngConfig(8)).samples
    fine = sample_limit(rep, 64, 8, 80, RngConfig(8)).samples
    assert np.all(fine >= coarse - 1e-12)


def test_refine_never_lowers():
    rep = classify_case(inst(X_LIMITED))
    plain = sample_limit(rep, 64, 6, 40, RngConfig(9)).samples
    refined = sample_limit(rep, 64, 6, 40, RngConfig(9), refine=True).samples
    assert np.all(refined >= plain - 1e-12)
    assert np.any(refined > plain)


def test_thread_count_does_not_change_output():
    rep = classify_case(inst(BOTH_TIGHT_EQUAL))
    a = sample_limit(rep, 32, 6, 200, RngConfig(10), threads=1).samples
    b = sample_limit(rep, 32, 6, 200, RngConfig(10), threads=3).samples
    assert np.array_equal(a, b)


def test_b2_two_active_slots_is_gaussian_with_known_variance():
    # the slice is a single point, so the limit is a linear functional of disjoint increments
    rep = classify_case(inst(BOTH_TIGHT_SPLIT))
    g = grid_K(rep, 5)
    (lx,), (ly,) = g.lam_x, g.lam_y
    s, t = (float(rep.constants[k]) for k in ("s", "t"))
    var = 0.0
    for lam, q, c in ((lx, rep.qX, s), (ly, rep.qY, t)):
        for i in rep.I0:
            p = float(q[i])
            var += (c / p) ** 2 * float(lam[i]) * p * (1 - p)
    res = sample_limit(rep, 80, 5, 20_000, RngConfig(11))
    assert abs(res.mean()) < 5 * math.sqrt(var / 20_000)
    assert np.var(res.samples, ddof=1) == pytest.approx(var, rel=0.05)


def test_single_active_slot_shortcut():
    rep = blocks_analysis(inst((["1/3", "2/3"], ["1/4", "3/4"])), (1, 2))
    assert rep.I == (2,)
    res = sample_limit_blocks(rep, 16, 4, 20_000, RngConfig(12))
    # Case a on letter 2 alone: N(0, pX2 (1 - pX2))
    assert np.std(res.samples) == pytest.approx(math.sqrt(2 / 9), rel=0.03)
    assert res.meta["grid_points"] == 1


def test_identity_blocks_match_plain_sampling():
    I = inst(BOTH_TIGHT_EQUAL)
    plain = sample_limit(classify_case(I), 32, 6, 150, RngConfig(13))
    blocks = sample_limit_blocks(blocks_analysis(I, BlockOrder.identity(I.m)), 32, 6, 150,
                                 RngConfig(13))
    assert np.array_equal(plain.samples, blocks.samples)
    other = sample_limit_blocks(blocks_analysis(I, BlockOrder.identity(I.m)), 32, 6, 150,
                                RngConfig(14))
    assert ks_two_sample(plain.samples, other.samples).pvalue > 0.001
    with pytest.raises(LciError):
        sample_limit_blocks(classify_case(I), 32, 6, 10)


def test_repeated_letter_blocks_share_a_path():
    rep = blocks_analysis(uniform_instance(2), (2, 1, 2))
    res = sample_limit_blocks(rep, 32, 6, 100, RngConfig(15))
    assert np.all(np.isfinite(res.samples))
    assert res.metadata()["alpha"] == "2,1,2"


def test_csv_round_trip(tmp_path):
    rep = classify_case(inst(X_LIMITED))
    res = sample_limit(rep, 32, 4, 70, RngConfig(16))
    f = tmp_path / "s.csv"
    write_samples_csv(f, res.samples, res.metadata())
    back, meta = read_samples_csv(f)
    assert np.array_equal(back, res.samples)
    assert meta["case"] == "CaseA" and meta["reps"] == "70" and meta["seed"] == "16"


def test_bad_arguments():
    rep = classify_case(inst(X_LIMITED))
    with pytest.raises(LciError):
        sample_limit(rep, 32, 4, 0)
    with pytest.raises(LciError):
        sample_limit(rep, 1, 4, 5)
