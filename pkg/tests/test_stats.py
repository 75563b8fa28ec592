import math
import random

import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from govsim.stats import (
    DegenerateTestError,
    betainc,
    cohens_d,
    compare,
    effect_label,
    sig_stars,
    summarize,
    welch_t_test,
)


def t_density(x, df):
    return math.exp(
        special.gammaln((df + 1) / 2) - special.gammaln(df / 2) - 0.5 * math.log(df * math.pi)
        - (df + 1) / 2 * math.log1p(x * x / df)
    )


def oracle_p(t, df):
    """Two-sided p by adaptive quadrature of the Student-t density."""
    tail, _ = integrate.quad(t_density, abs(t), math.inf, args=(df,), epsabs=1e-14, epsrel=1e-13, limit=200)
    return min(1.0, 2 * tail)


def oracle_welch(a, b):
    """Direct transcription of the textbook formulas, written independently."""
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    t = (ma - mb) / math.sqrt(va / na + vb / nb)
    df = (va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    sp = math.sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2))
    return t, df, oracle_p(t, df), (ma - mb) / sp


def random_pair(rng):
    a = [rng.gauss(0, rng.uniform(0.5, 2)) for _ in range(rng.randint(2, 12))]
    b = [rng.gauss(rng.uniform(-2, 2), rng.uniform(0.5, 2)) for _ in range(rng.randint(2, 12))]
    return a, b


def test_summarize_hand():
    s = summarize([1, 2, 3])
    assert (s.n, s.mean, s.sd) == (3, 2.0, 1.0)
    assert s.ci95_half == pytest.approx(1.96 / math.sqrt(3), abs=1e-12)
    c = summarize([5, 5, 5, 5])
    assert c.sd == 0 and c.ci95_half == 0


def test_summarize_ci_reading():
    # 150 samples with sd 0.0375 give a half-width of about 0.006
    assert 1.96 * 0.0375 / math.sqrt(150) == pytest.approx(0.006, abs=5e-4)


def test_summarize_rejects_short():
    with pytest.raises(ValueError):
        summarize([1.0])


def test_welch_hand():
    t, df, p = welch_t_test([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert t == pytest.approx(-1.897366596101, abs=1e-9)
    assert df == pytest.approx(5.882352941176, abs=1e-9)
    assert p == pytest.approx(oracle_p(t, df), abs=1e-9)


def test_welch_identical_samples():
    t, df, p = welch_t_test([1, 2, 3], [1, 2, 3])
    assert t == 0 and p == 1.0


def test_welch_degenerate():
    with pytest.raises(DegenerateTestError):
        welch_t_test([1, 1, 1], [2, 2, 2])


def test_cohens_d_hand():
    assert cohens_d([1, 2, 3, 4, 5], [2, 4, 6, 8, 10]) == pytest.approx(-1.2, abs=1e-12)
    assert cohens_d([1, 2, 3], [1, 2, 3]) == 0
    with pytest.raises(DegenerateTestError):
        cohens_d([4, 4], [4, 4])


def test_published_l1_l2_reconstruction():
    # sds back-solved from CI half-widths .006 / .004 with n = 150
    n = 150
    sa, sb = 0.006 * math.sqrt(n) / 1.96, 0.004 * math.sqrt(n) / 1.96
    se = math.sqrt(sa**2 / n + sb**2 / n)
    t = (0.694 - 0.625) / se
    sp = math.sqrt((sa**2 + sb**2) / 2)
    assert abs(t - 19.87) / 19.87 < 0.10
    assert abs((0.694 - 0.625) / sp - 2.30) / 2.30 < 0.15


def test_against_oracle_50_cases():
    rng = random.Random(50)
    for _ in range(50):
        a, b = random_pair(rng)
        t, df, p = welch_t_test(a, b)
        ot, odf, op, od = oracle_welch(a, b)
        assert abs(t - ot) < 1e-9
        assert abs(df - odf) < 1e-9
        assert abs(p - op) < 1e-9
        assert abs(cohens_d(a, b) - od) < 1e-9


def test_betainc_against_scipy():
    rng = random.Random(1)
    for _ in range(200):
        a, b, x = rng.uniform(0.1, 50), rng.uniform(0.1, 50), rng.random()
        assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-12)
    assert betainc(2, 3, 0.0) == 0.0 and betainc(2, 3, 1.0) == 1.0


samples = st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=15)


@settings(max_examples=1000, deadline=None)
@given(samples, samples, st.floats(0.01, 100))
def test_symmetry_and_scale(a, b, c):
    try:
        t, df, p = welch_t_test(a, b)
        d = cohens_d(a, b)
    except DegenerateTestError:
        return
    if max(abs(x) for x in a + b) > 0 and min(summarize(a).sd, summarize(b).sd) < 1e-6:
        return  # near-degenerate variance: relative rounding dominates
    t2, df2, p2 = welch_t_test(b, a)
    assert t2 == pytest.approx(-t, rel=1e-9, abs=1e-12)
    assert df2 == pytest.approx(df, rel=1e-9)
    assert p2 == pytest.approx(p, rel=1e-9, abs=1e-12)
    ts, dfs, ps = welch_t_test([c * x for x in a], [c * x for x in b])
    assert ts == pytest.approx(t, rel=1e-7, abs=1e-9)
    assert dfs == pytest.approx(df, rel=1e-7)
    assert ps == pytest.approx(p, rel=1e-6, abs=1e-12)
    assert cohens_d([c * x for x in a], [c * x for x in b]) == pytest.approx(d, rel=1e-7, abs=1e-9)


def test_t_and_d_agree_for_equal_n():
    rng = random.Random(9)
    n = 200
    a = [rng.gauss(0.6, 0.03) for _ in range(n)]
    b = [rng.gauss(0.7, 0.03) for _ in range(n)]
    t, _, _ = welch_t_test(b, a)
    d = cohens_d(b, a)
    assert abs(t - d * math.sqrt(n / 2)) / abs(t) < 0.01


@pytest.mark.parametrize("d,label", [
    (0.0, "Negligible"), (0.19, "Negligible"), (0.2, "Small"), (0.5, "Medium"), (0.8, "Large"),
    (2.30, "Large"), (3.16, "Large"), (3.99, "Large"), (4.0, "Very Large"), (4.80, "Very Large"), (-5.9, "Very Large"),
])
def test_effect_label(d, label):
    assert effect_label(d) == label


@pytest.mark.parametrize("p,stars", [(0.0005, "***"), (0.001, "**"), (0.005, "**"), (0.03, "*"), (0.05, "ns"), (0.5, "ns"), (1.0, "ns")])
def test_sig_stars(p, stars):
    assert sig_stars(p) == stars


@pytest.mark.parametrize("p", [-0.01, 1.01])
def test_sig_stars_rejects(p):
    with pytest.raises(ValueError):
        sig_stars(p)


def test_compare_bundles_everything():
    r = compare([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert r.label == "Large" and r.stars == "ns"
    assert 0 <= r.p <= 1
