import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from torsion_bench import DegenerateInput, DomainError, PreconditionError
from torsion_bench import metrized_complex as mc

LOG2 = math.log(2)
ranks_st = st.lists(st.integers(0, 3), min_size=1, max_size=4)
seed_st = st.integers(0, 2 ** 32 - 1)


def oracle_torsion(c):
    """``1/2 sum (-1)^g g log det Laplacian`` with adjoints ``G_k^{-1} d^T G_{k+1}``."""
    total = 0.0
    for k, n in enumerate(c.dims):
        if n == 0:
            continue
        lap = np.zeros((n, n))
        g = c.grams[k]
        if k > 0:
            d = c.diffs[k - 1]
            lap += d @ np.linalg.solve(c.grams[k - 1], d.T @ g)
        if k < len(c.diffs):
            d = c.diffs[k]
            lap += np.linalg.solve(g, d.T @ c.grams[k + 1] @ d)
        sign, logdet = np.linalg.slogdet(lap)
        assert sign > 0
        total += (-1) ** c.labels[k] * c.labels[k] * logdet
    return 0.5 * total


def random_c(seed, ranks):
    return mc.random_exact_complex(np.random.default_rng(seed), ranks)


@pytest.mark.parametrize("r", [1, 2, 5])
def test_sqrt2_normalization(r):
    assert mc.torsion_acyclic(mc.sqrt2_complex(r)) == pytest.approx(-r / 2 * LOG2, abs=1e-12)


def test_empty_complex_has_zero_torsion():
    assert mc.torsion_acyclic(mc.empty_complex()) == 0.0


@given(seed_st, ranks_st)
def test_matches_laplacian_oracle(seed, ranks):
    c = random_c(seed, ranks)
    assert mc.torsion_acyclic(c) == pytest.approx(oracle_torsion(c), abs=1e-9)


@given(seed_st, ranks_st)
def test_isometric_change_of_basis(seed, ranks):
    rng = np.random.default_rng(seed)
    c = mc.random_exact_complex(rng, ranks)
    ps = [mc._random_invertible(rng, n) for n in c.dims]
    diffs = [ps[k + 1] @ d @ np.linalg.inv(ps[k]) for k, d in enumerate(c.diffs)]
    grams = [np.linalg.inv(p).T @ g @ np.linalg.inv(p) if p.size else g for p, g in zip(ps, c.grams)]
    grams = [0.5 * (g + g.T) for g in grams]
    moved = mc.MetrizedComplex(c.labels, tuple(grams), tuple(diffs))
    assert mc.torsion_acyclic(moved) == pytest.approx(mc.torsion_acyclic(c), abs=1e-9)


@given(seed_st, ranks_st, ranks_st)
def test_direct_sum_is_additive(seed, r1, r2):
    rng = np.random.default_rng(seed)
    a, b = mc.random_exact_complex(rng, r1), mc.random_exact_complex(rng, r2)
    total = mc.torsion_acyclic(mc.direct_sum(a, b))
    assert total == pytest.approx(mc.torsion_acyclic(a) + mc.torsion_acyclic(b), abs=1e-9)


@given(seed_st, ranks_st, st.integers(-3, 3))
def test_shift_sign_law(seed, ranks, shift):
    c = random_c(seed, ranks)
    expected = (-1) ** (shift % 2) * mc.torsion_acyclic(c)
    assert mc.torsion_acyclic(mc.shift_grading(c, shift)) == pytest.approx(expected, abs=1e-9)


@given(seed_st, ranks_st)
def test_duality(seed, ranks):
    c = random_c(seed, ranks)
    wd = mc.whitened(c)
    n = len(c) - 1
    dual = mc.MetrizedComplex.from_maps(range(len(c)), c.dims[::-1], [d.T for d in wd[::-1]])
    assert mc.torsion_acyclic(dual) == pytest.approx(-((-1) ** n) * mc.torsion_acyclic(c), abs=1e-9)


def _log_vol_oracle(c, k):
    w = mc.whitened(c)[k]
    ev = np.linalg.eigvalsh(w.T @ w)
    return float(np.sum(np.log(ev[ev > 1e-12 * max(ev.max(initial=0), 1)])))


@given(seed_st, st.lists(st.integers(1, 3), min_size=2, max_size=4))
def test_truncation_telescopes(seed, ranks):
    c = random_c(seed, ranks)
    prev = 0.0
    for k in range(len(ranks)):
        cur = mc.torsion_acyclic(mc.truncate(c, c.labels[k]))
        assert cur - prev == pytest.approx(0.5 * (-1) ** (k + 1) * _log_vol_oracle(c, k), abs=1e-9)
        prev = cur
    assert prev == pytest.approx(mc.torsion_acyclic(c), abs=1e-9)


@given(seed_st, ranks_st, st.integers(1, 4))
def test_rank_linearity(seed, ranks, r):
    c = random_c(seed, ranks)
    assert mc.torsion_acyclic(mc.tensor_rank(c, r)) == pytest.approx(r * mc.torsion_acyclic(c), abs=1e-9)


def test_scaled_sequences_formula():
    base = mc.two_term(np.eye(3))
    assert mc.compare_scaled_sequences(base, [(1, math.sqrt(2))]) == pytest.approx(1.5 * LOG2, abs=1e-12)
    with pytest.raises(DomainError):
        mc.compare_scaled_sequences(base, [(0, 0.0)])


def test_additivity_check_on_split_sequences():
    a = mc.sqrt2_complex(2)
    assert mc.additivity_check(mc.empty_complex(), a, mc.shift_grading(a, -1)) == pytest.approx(0.0, abs=1e-12)


def test_non_exact_rejected():
    with pytest.raises(PreconditionError, match="not exact"):
        mc.torsion_acyclic(mc.two_term([[1.0, 0.0]]))


def test_dd_not_zero_rejected():
    c = mc.MetrizedComplex.from_maps((0, 1, 2), (1, 1, 1), [[[1.0]], [[1.0]]])
    with pytest.raises(PreconditionError, match="d o d"):
        mc.torsion_acyclic(c)


def test_ill_conditioned_gram():
    g = np.diag([1.0, 1e-14])
    c = mc.two_term(np.eye(2), grams=[g, np.eye(2)])
    with pytest.raises(DegenerateInput):
        mc.torsion_acyclic(c)


def test_bad_gram_and_labels():
    with pytest.raises(DomainError):
        mc.two_term([[1.0]], grams=[[[-1.0]], [[1.0]]]).__class__  # construction is fine
        mc.torsion_acyclic(mc.two_term([[1.0]], grams=[[[-1.0]], [[1.0]]]))
    with pytest.raises(DomainError):
        mc.two_term([[1.0]], labels=(1, 0))


@given(seed_st, ranks_st)
def test_file_roundtrip(seed, ranks):
    c = random_c(seed, ranks)
    back = mc.loads(mc.dumps(c))
    assert back.labels == c.labels
    assert mc.torsion_acyclic(back) == pytest.approx(mc.torsion_acyclic(c), abs=1e-12)


def test_file_format_with_identity_and_comments(tmp_path):
    text = "# sqrt2 map, rank 2\ndims 2 2\nlabels 0 1\nidentity\nidentity\n1.4142135623730951 0\n0 1.4142135623730951\n"
    path = tmp_path / "c.txt"
    path.write_text(text)
    assert mc.torsion_acyclic(mc.load(path)) == pytest.approx(-LOG2, abs=1e-12)


@pytest.mark.parametrize("text,where", [
    ("labels 0\n", "dims"),
    ("dims 1 1\nlabels 0 1\nidentity\nidentity\n1 2\n", "line 5"),
    ("dims 1 1\nlabels 0 1\nidentity\nidentity\nq\n", "line 5"),
    ("dims 1 1\nlabels 0\n", "line 2"),
    ("dims 1 1\nlabels 0 1\nidentity\nidentity\n1\n7\n", "line 6"),
])
def test_file_errors_carry_line_numbers(text, where):
    with pytest.raises(DomainError, match=where):
        mc.loads(text)
