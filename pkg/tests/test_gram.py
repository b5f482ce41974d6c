import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icpmaps.algebra import Algebra, amplified_algebra, multiply, random_element
from icpmaps.blockmap import BlockMultilinearMap
from icpmaps.errors import NonHermitianGramError
from icpmaps.factory import (
    point_evaluation_example,
    schur_block_map,
    trace_example,
    worked_level2_tuple,
)
from icpmaps.gram import (
    admissibility_report,
    build_gram,
    cp_refute,
    gram_is_psd,
    positivity_falsify,
    sample_admissible_tuple,
)
from icpmaps.multimap import MultilinearMap


# -- admissible tuples ---------------------------------------------------------


@pytest.mark.parametrize("k,t", [(1, 1), (2, 1), (3, 1), (3, 2), (4, 2)])
def test_sampled_tuples_are_admissible(k, t):
    alg = Algebra([2])
    mats = sample_admissible_tuple(alg, k, t, np.random.default_rng(3))
    assert len(mats) == k
    report = admissibility_report(mats)
    assert report["palindromic"] and report["palindrome_deviation"] == 0.0
    assert report["admissible"]


@settings(max_examples=40, deadline=None)
@given(
    k=st.integers(1, 5),
    t=st.integers(1, 2),
    seed=st.integers(0, 10_000),
    blocks=st.sampled_from([(1, 1), (2,), (2, 1)]),
)
def test_admissibility_holds_for_all_samples(k, t, seed, blocks):
    mats = sample_admissible_tuple(Algebra(blocks), k, t, np.random.default_rng(seed))
    assert admissibility_report(mats)["admissible"]


def test_sampled_tuple_structure_odd():
    alg = Algebra([1, 1])
    mats = sample_admissible_tuple(alg, 3, 1, np.random.default_rng(5))
    amp = amplified_algebra(alg, 1)
    mid = amp.embed(mats[1])
    assert mid.is_positive()
    assert np.array_equal(mats[2].coords, mats[0].star().coords)


def test_sampled_tuple_structure_even():
    alg = Algebra([1, 1])
    mats = sample_admissible_tuple(alg, 4, 1, np.random.default_rng(5))
    assert np.array_equal(mats[3].coords, mats[0].star().coords)
    assert np.array_equal(mats[2].coords, mats[1].star().coords)


def test_sampling_is_seed_deterministic():
    alg = Algebra([2])
    a = sample_admissible_tuple(alg, 3, 2, np.random.default_rng(11))
    b = sample_admissible_tuple(alg, 3, 2, np.random.default_rng(11))
    for x, y in zip(a, b):
        assert np.array_equal(x.coords, y.coords)


# -- falsifier --------------------------------------------------------------------


def test_falsifier_silent_on_trace_example():
    assert positivity_falsify(trace_example(2), levels=(1, 2), trials=120, seed=0) is None


def test_falsifier_finds_sign_flip():
    coeffs = np.zeros((2, 2, 2, 1, 1), dtype=complex)
    coeffs[0, 0, 0] = -1.0
    neg = MultilinearMap(Algebra([1, 1]), 3, 1, coeffs)
    ce = positivity_falsify(neg, levels=(1,), trials=100, seed=0)
    assert ce is not None and ce.level == 1 and ce.min_eigenvalue < 0
    assert admissibility_report(ce.mats)["admissible"]


def test_falsifier_silent_on_dilation_corpus(small_corpus):
    for entry in small_corpus:
        ce = positivity_falsify(entry.block_map, levels=(1, 2, 3), trials=40, seed=entry.seed)
        assert ce is None, entry.name


# -- Gram kernel --------------------------------------------------------------------


def test_worked_example_gram_by_brute_force():
    """All 16 basis pairs computed via the defining formula with explicit
    element arithmetic."""
    phi = point_evaluation_example(2)
    gram = build_gram(phi)
    assert gram.size == 4
    alg = phi.algebra
    expected = np.zeros((4, 4), dtype=complex)
    for q1 in range(2):
        for q2 in range(2):
            for p1 in range(2):
                for p2 in range(2):
                    args = [
                        alg.basis_element(q2).star(),
                        multiply(alg.basis_element(q1).star(), alg.basis_element(p1)),
                        alg.basis_element(p2),
                    ]
                    expected[q1 * 2 + q2, p1 * 2 + p2] = phi.evaluate(args)[0, 0]
    assert np.array_equal(gram.matrix, expected)
    assert expected[0, 0] == 1.0 and np.count_nonzero(expected) == 1


def test_gram_k1_is_choi_type_matrix():
    lam = np.array([[1.0, 0.5], [0.5, 1.0]])
    block = schur_block_map(lam)
    gram = build_gram(block)
    # k=1 on a one-dimensional algebra: kernel entries are phi_ij(e* e) = lam_ij
    assert np.array_equal(gram.matrix, lam.astype(complex))


def test_gram_of_zero_map_is_zero():
    zero = MultilinearMap(Algebra([1, 1]), 3, 1, np.zeros((2, 2, 2, 1, 1)))
    assert np.abs(build_gram(zero).matrix).max() == 0.0


def test_gram_psd_verdicts(small_corpus):
    ok, min_eig = gram_is_psd(build_gram(point_evaluation_example(2)))
    assert ok and min_eig == 0.0
    for entry in small_corpus:
        gram = build_gram(entry.block_map)
        ok, min_eig = gram_is_psd(gram)
        assert ok and min_eig >= -1e-9 * max(1.0, gram.norm()), entry.name


def test_gram_detects_negative_unit_coefficient():
    coeffs = point_evaluation_example(2).coeffs.copy()
    coeffs[0, 0, 0] = -1.0
    phi = MultilinearMap(Algebra([1, 1]), 3, 1, coeffs)
    ok, min_eig = gram_is_psd(build_gram(phi))
    assert not ok and min_eig <= -0.5


def test_non_hermitian_gram_raises():
    rng = np.random.default_rng(2)
    coeffs = rng.standard_normal((2, 2, 2, 1, 1)) + 1j * rng.standard_normal((2, 2, 2, 1, 1))
    phi = MultilinearMap(Algebra([1, 1]), 3, 1, coeffs)
    with pytest.raises(NonHermitianGramError):
        gram_is_psd(build_gram(phi))


def test_cp_refute(small_corpus):
    for entry in small_corpus[:6]:
        assert cp_refute(entry.block_map) is None, entry.name
    neg = MultilinearMap(Algebra([2]), 3, 2, -trace_example(2).coeffs)
    record = cp_refute(neg)
    assert record is not None and record.min_eigenvalue < 0
    zero = MultilinearMap(Algebra([1, 1]), 3, 1, np.zeros((2, 2, 2, 1, 1)))
    assert cp_refute(zero) is None


def test_falsifier_and_refuter_agree_on_sign_flip():
    coeffs = np.zeros((2, 2, 2, 1, 1), dtype=complex)
    coeffs[0, 0, 0] = -1.0
    neg = MultilinearMap(Algebra([1, 1]), 3, 1, coeffs)
    assert positivity_falsify(neg, levels=(1,), trials=100, seed=0) is not None
    assert cp_refute(neg) is not None


def test_gram_of_adjoint_is_conjugate_transpose(rng):
    alg = Algebra([1, 1])
    coeffs = rng.standard_normal((2, 2, 2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2, 2, 2))
    phi = MultilinearMap(alg, 3, 2, coeffs)
    g = build_gram(phi).matrix
    g_adj = build_gram(phi.adjoint()).matrix
    assert np.abs(g_adj - g.conj().T).max() <= 1e-10 * (1 + np.abs(g).max())
    block = BlockMultilinearMap.constant_grid(phi, 2)
    gb = build_gram(block).matrix
    gb_adj = build_gram(block.block_adjoint()).matrix
    assert np.abs(gb_adj - gb.conj().T).max() <= 1e-10 * (1 + np.abs(gb).max())


def test_quadratic_form_matches_definition_sum(rng, corpus):
    """x^dagger G x against the defining double sum over two elementary
    tensors, evaluated with explicit element arithmetic."""
    entry = next(e for e in corpus if e.k == 3 and e.n == 2 and e.d == 2)
    block = entry.block_map
    alg, m, n, h = block.algebra, block.m, block.n, block.h
    gram = build_gram(block)
    d = alg.dim
    for _ in range(3):
        tensors = []
        for _ in range(2):  # two elementary tensors
            factors = [random_element(alg, rng) for _ in range(m)]
            vec = rng.standard_normal((n, h)) + 1j * rng.standard_normal((n, h))
            tensors.append((factors, vec))
        # coordinates of the sum inside A^{(x) m} (x) H^n
        x = np.zeros(gram.size, dtype=complex)
        for factors, vec in tensors:
            kron = factors[0].coords()
            for f in factors[1:]:
                kron = np.kron(kron, f.coords())
            x += np.einsum("a,js->ajs", kron, vec).reshape(-1)
        # definition: sum over pairs (l, r) and grid entries
        acc = 0.0 + 0.0j
        for a_factors, f_vec in tensors:
            for b_factors, g_vec in tensors:
                for i in range(n):
                    for j in range(n):
                        args = [b_factors[q].star() for q in range(m - 1, 0, -1)]
                        args.append(multiply(b_factors[0].star(), a_factors[0]))
                        args.extend(a_factors[1:])
                        val = block.entries[i][j].evaluate(args)
                        acc += g_vec[i].conj() @ val @ f_vec[j]
        quad = x.conj() @ gram.matrix @ x
        assert abs(quad - acc) <= 1e-10 * (1 + abs(acc))


def test_quadratic_form_matches_definition_sum_even_arity(rng, corpus):
    """Even-arity kernel: no middle product, the starred factors simply
    precede the unstarred ones."""
    entry = next(e for e in corpus if e.k == 4 and e.n == 2 and e.d == 2)
    block = entry.block_map
    alg, m, n, h = block.algebra, block.m, block.n, block.h
    gram = build_gram(block)
    for _ in range(3):
        factors = [random_element(alg, rng) for _ in range(m)]
        vec = rng.standard_normal((n, h)) + 1j * rng.standard_normal((n, h))
        kron = factors[0].coords()
        for f in factors[1:]:
            kron = np.kron(kron, f.coords())
        x = np.einsum("a,js->ajs", kron, vec).reshape(-1)
        args = [factors[q].star() for q in range(m - 1, -1, -1)] + factors
        acc = 0.0 + 0.0j
        for i in range(n):
            for j in range(n):
                val = block.entries[i][j].evaluate(args)
                acc += vec[i].conj() @ val @ vec[j]
        quad = x.conj() @ gram.matrix @ x
        assert abs(quad - acc) <= 1e-10 * (1 + abs(acc))


def test_worked_tuple_admissibility_is_reported():
    report = admissibility_report(worked_level2_tuple())
    assert report["admissible"] is False
    assert report["palindromic"] is False
    assert report["middle_positive"] is True
