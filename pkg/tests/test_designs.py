import math
from itertools import combinations

import numpy as np
import pytest

from gmux.designs import (
    MultiKWeights,
    complement_design,
    complement_mse,
    identity_design,
    individual_plus_joint,
    individual_plus_joint_mse,
    multi_k_design,
    multi_k_spectrum,
    parse_weights,
    single_k_design,
    single_k_mse,
)
from gmux.errors import EnumerationCapError, InvalidDesignError
from gmux.model import dense_spectrum, fisher_information, trace_inverse, validate_design


def tr(d):
    return trace_inverse(fisher_information(d))


def lapack_tr(d):
    # independent oracle: explicit C and LAPACK eigenvalues
    c = d.rows.T @ np.diag(d.times) @ d.rows
    return float(np.sum(1 / np.linalg.eigvalsh(c)))


@pytest.mark.parametrize("n", [1, 4, 20])
def test_identity(n):
    d = identity_design(n)
    assert d.m == n and np.all(d.times == 1)
    assert tr(d) == n


def test_complement_values():
    d = complement_design(3)
    assert d.rows.tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert tr(d) == pytest.approx(2.25, rel=1e-14)
    assert tr(complement_design(4)) == pytest.approx(3 + 1 / 9, rel=1e-14)
    assert tr(complement_design(2)) == pytest.approx(2.0, rel=1e-14)
    for n in range(2, 31):
        assert tr(complement_design(n)) == pytest.approx(complement_mse(n), rel=1e-12)


def test_individual_plus_joint_shapes():
    d = individual_plus_joint(2, 0.0)
    assert d.m == 2 and tr(d) == 2
    d = individual_plus_joint(3, 0.25)
    assert d.m == 4 and d.rows[-1].tolist() == [1, 1, 1] and d.times[-1] == 0.75
    assert validate_design(d).valid
    with pytest.raises(InvalidDesignError):
        individual_plus_joint(3, 1.0)


def test_individual_plus_joint_values():
    # frozen from the LAPACK oracle on the explicit 3x2 and 11x10 designs
    assert tr(individual_plus_joint(2, 0.0532)) == pytest.approx(1.9185556023353771, rel=1e-12)
    assert tr(individual_plus_joint(10, 0.1)) == pytest.approx(10.091743119266063, rel=1e-12)
    assert individual_plus_joint_mse(10, 0.1) == pytest.approx(10.091743119266063, rel=1e-12)


@pytest.mark.parametrize("n", range(2, 21))
def test_individual_plus_joint_formula_vs_dense(n):
    for beta in np.linspace(0, 0.99, 100):
        d = individual_plus_joint(n, float(beta))
        assert individual_plus_joint_mse(n, float(beta)) == pytest.approx(lapack_tr(d), rel=1e-10)


def test_single_k_small_cases():
    d = single_k_design(4, 2)
    assert d.m == 6 and np.allclose(d.times, 4 / 6)
    c = fisher_information(d)
    assert c.structure[0] == pytest.approx(2, rel=1e-14)
    assert c.structure[1] == pytest.approx(2 / 3, rel=1e-14)
    assert single_k_design(3, 1).rows.tolist() == np.eye(3, dtype=int).tolist()
    d = single_k_design(5, 4)
    assert sorted(map(tuple, d.rows)) == sorted(map(tuple, complement_design(5).rows))
    assert np.all(d.times == 1.0)


def test_single_k_lexicographic():
    d = single_k_design(5, 3)
    got = [tuple(np.flatnonzero(r)) for r in d.rows]
    assert got == list(combinations(range(5), 3))


def test_single_k_cap():
    with pytest.raises(EnumerationCapError):
        single_k_design(30, 15)
    with pytest.raises(InvalidDesignError):
        single_k_design(4, 4)


def test_single_k_mse_values():
    assert single_k_mse(20, 10) == 3.62
    assert single_k_mse(7, 4) == 3.0625 == 4 * 49 / 64
    for n in range(2, 40):
        assert single_k_mse(n, 1) == n


def test_closed_form_vs_enumeration():
    for n in range(2, 11):
        for k in range(1, n):
            d = single_k_design(n, k)
            assert tr(d) == pytest.approx(single_k_mse(n, k), rel=1e-9)
            assert lapack_tr(d) == pytest.approx(single_k_mse(n, k), rel=1e-9)


def test_gram_entries_are_binomials():
    for n in range(2, 13):
        for k in range(1, n):
            b = single_k_design(n, k).rows
            g = b.T @ b
            assert np.all(np.diag(g) == math.comb(n - 1, k - 1))
            off = g[~np.eye(n, dtype=bool)]
            assert np.all(off == (math.comb(n - 2, k - 2) if k >= 2 else 0))


def test_multi_k_spectrum_examples():
    s = multi_k_spectrum(20, MultiKWeights.from_mapping(20, {10: 1.0}))
    assert s.entries[0][1] == 19 and s.entries[0][0] == pytest.approx(100 / 19)
    assert s.entries[1] == (100.0, 1)
    assert s.trace_inverse() == pytest.approx(3.62, rel=1e-12)

    s = multi_k_spectrum(20, MultiKWeights.from_mapping(20, {1: 0.5, 10: 0.5}))
    assert s.entries[0][0] == pytest.approx(0.5 + 0.5 * 100 / 19, rel=1e-14)
    assert s.entries[1][0] == pytest.approx(50.5, rel=1e-14)
    assert s.trace_inverse() == pytest.approx(19 / (0.5 + 50 / 19) + 1 / 50.5, rel=1e-14)
    assert s.trace_inverse() == pytest.approx(6.087, abs=5e-4)

    s = multi_k_spectrum(4, MultiKWeights.from_mapping(4, {2: 1.0}))
    assert s.trace_inverse() == pytest.approx(2.5, rel=1e-14)


def test_multi_k_design_examples():
    d = multi_k_design(4, MultiKWeights.from_mapping(4, {1: 0.5, 3: 0.5}))
    assert d.m == 8
    c = fisher_information(d)
    assert np.allclose(c.matrix, np.eye(4) + np.ones((4, 4)), atol=1e-14)
    assert tr(d) == pytest.approx(3.2, rel=1e-12)
    d = multi_k_design(3, MultiKWeights.from_mapping(3, {2: 1.0}))
    assert sorted(map(tuple, d.rows)) == sorted(map(tuple, complement_design(3).rows))
    assert tr(multi_k_design(5, MultiKWeights.from_mapping(5, {3: 1.0}))) == pytest.approx(16 / 6 + 1 / 9, rel=1e-12)


def test_multi_k_all_ones_block():
    w = MultiKWeights.from_mapping(3, {1: 0.5, 3: 0.5})
    d = multi_k_design(3, w)
    assert d.rows[-1].tolist() == [1, 1, 1] and d.times[-1] == pytest.approx(1.5)
    assert validate_design(d).valid
    degenerate = multi_k_design(3, MultiKWeights.from_mapping(3, {3: 1.0}))
    assert not validate_design(degenerate).identifiable


def test_multi_k_dense_matches_closed_form(rng):
    for _ in range(150):
        n = int(rng.integers(2, 11))
        support = rng.choice(np.arange(1, n + 1), size=int(rng.integers(1, n + 1)), replace=False)
        if set(support.tolist()) == {n}:
            continue
        raw = rng.uniform(0.05, 1.0, support.size)
        alphas = np.zeros(n)
        alphas[support - 1] = raw / raw.sum()
        w = MultiKWeights(tuple(alphas))
        d = multi_k_design(n, w)
        closed = multi_k_spectrum(n, w).eigenvalues()
        dense = np.sort(np.linalg.eigvalsh(fisher_information(d).matrix))
        assert np.allclose(np.sort(closed), dense, atol=1e-9)
        assert dense_spectrum(fisher_information(d)).size == n


def test_single_k_convex_in_k():
    for n in range(3, 61):
        f = [single_k_mse(n, k) for k in range(1, n)]
        assert all(f[i - 1] - 2 * f[i] + f[i + 1] >= 0 for i in range(1, len(f) - 1))


def test_weights_validation_and_parse():
    with pytest.raises(InvalidDesignError):
        MultiKWeights((0.5, 0.4))
    with pytest.raises(InvalidDesignError):
        MultiKWeights((1.5, -0.5))
    w = parse_weights("1:1/2, 10:0.5", 20)
    assert w.alphas[0] == 0.5 and w.alphas[9] == 0.5
    with pytest.raises(InvalidDesignError):
        parse_weights("1-0.5", 4)
