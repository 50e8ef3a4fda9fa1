import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from quiverhall.errors import ContainmentError
from quiverhall.gflinalg import (
    FpMatrix,
    SubspaceBasis,
    complement_in,
    enumerate_subspaces,
    enumerate_superspaces,
    full_space,
    gaussian_binomial,
    kernel_basis,
    next_prime_list,
    rank,
    rank_batch,
    rref,
    subspace_arrays,
    subspace_from_rows,
    zero_space,
)


def fp(p, rows):
    return FpMatrix(p, rows)


def test_rank_identity():
    assert rank(FpMatrix.identity(3, 2)) == 2


def test_rank_zero():
    assert rank(FpMatrix.zeros(2, 3, 4)) == 0


def test_rank_dependent_rows():
    # second row is 2x the first mod 5
    assert rank(fp(5, [[1, 2], [2, 4]])) == 1


def test_modulus_must_be_prime():
    with pytest.raises(ValueError):
        FpMatrix(6, [[1]])


def test_kernel_of_identity_is_empty():
    k = kernel_basis(FpMatrix.identity(2, 2))
    assert k.dim == 0


def test_kernel_of_zero_map_is_everything():
    k = kernel_basis(FpMatrix.zeros(3, 2, 3))
    assert k.dim == 3


def test_kernel_single_relation():
    k = kernel_basis(fp(2, [[1, 1]]))
    assert k.dim == 1
    assert k.basis.a.tolist() == [[1, 1]]


def test_complement_coordinate_line():
    sub = subspace_from_rows(2, 2, [[1, 0]])
    comp = complement_in(sub, full_space(2, 2))
    assert comp.basis.a.tolist() == [[0, 1]]


def test_complement_of_full_space_is_zero():
    comp = complement_in(full_space(3, 2), full_space(3, 2))
    assert comp.dim == 0


def test_complement_greedy_pivot_rule():
    # pivot of span{(1,1)} is column 0, so the greedy rule keeps e_2
    sub = subspace_from_rows(3, 2, [[1, 1]])
    comp = complement_in(sub, full_space(3, 2))
    assert comp.basis.a.tolist() == [[0, 1]]


def test_complement_requires_containment():
    sub = subspace_from_rows(2, 2, [[1, 0]])
    other = subspace_from_rows(2, 2, [[0, 1]])
    with pytest.raises(ContainmentError):
        complement_in(sub, other)


def test_complement_is_deterministic():
    sub = subspace_from_rows(5, 4, [[1, 2, 3, 4]])
    a = complement_in(sub, full_space(5, 4))
    b = complement_in(sub, full_space(5, 4))
    assert a == b


def test_enumerate_subspaces_count_examples():
    assert len(list(enumerate_subspaces(2, 1, 2))) == 3
    assert len(list(enumerate_subspaces(3, 1, 3))) == 13
    assert list(enumerate_subspaces(4, 0, 5)) == [zero_space(5, 4)]


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_enumerate_subspaces_matches_gaussian_binomial(n, p):
    for k in range(n + 1):
        subs = list(enumerate_subspaces(n, k, p))
        assert len(subs) == gaussian_binomial(n, k, p)
        assert len(set(subs)) == len(subs)


def test_subspace_arrays_agree_with_enumeration():
    for n, k, p in [(3, 1, 3), (4, 2, 2), (3, 2, 5)]:
        bases, pivots, frees = subspace_arrays(n, k, p)
        listed = [s.basis.a.tolist() for s in enumerate_subspaces(n, k, p)]
        assert bases.tolist() == listed
        for row_b, row_p, row_f in zip(bases, pivots, frees):
            assert sorted(list(row_p) + list(row_f)) == list(range(n))


def test_enumerate_superspaces():
    w = subspace_from_rows(2, 3, [[1, 0, 0]])
    sup = list(enumerate_superspaces(w, 2))
    # planes containing a line in F_2^3: [2 choose 1]_2 = 3
    assert len(sup) == 3
    assert all(s.contains(w) for s in sup)


@given(st.integers(0, 1), st.data())
@settings(max_examples=40, deadline=None)
def test_rank_equals_rank_of_transpose(seed, data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    rows = data.draw(st.integers(1, 4))
    cols = data.draw(st.integers(1, 4))
    entries = data.draw(
        st.lists(
            st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
    m = fp(p, entries)
    assert rank(m) == rank(m.transpose())


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_kernel_dim_plus_rank_is_cols(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    rows = data.draw(st.integers(1, 4))
    cols = data.draw(st.integers(1, 4))
    entries = data.draw(
        st.lists(
            st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
    m = fp(p, entries)
    assert kernel_basis(m).dim + rank(m) == cols


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_rank_batch_matches_scalar_rank(data):
    p = data.draw(st.sampled_from([2, 3, 5, 7]))
    rows = data.draw(st.integers(1, 4))
    cols = data.draw(st.integers(1, 4))
    batch = data.draw(st.integers(1, 6))
    mats = data.draw(
        st.lists(
            st.lists(
                st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
                min_size=rows,
                max_size=rows,
            ),
            min_size=batch,
            max_size=batch,
        )
    )
    arr = np.asarray(mats, dtype=np.int64)
    got = rank_batch(arr, p)
    want = [rank(fp(p, m)) for m in mats]
    assert got.tolist() == want


def test_rref_pivots_are_sorted_and_clean():
    m = fp(5, [[0, 2, 1], [3, 1, 4], [3, 3, 0]])
    red, piv = rref(m)
    assert list(piv) == sorted(piv)
    for r, c in enumerate(piv):
        col = red.a[:, c]
        assert col[r] == 1 and sum(col) == 1


def test_next_prime_list():
    assert next_prime_list([2, 3, 5], 5) == [2, 3, 5, 7, 11]
    assert next_prime_list([7, 3], 2) == [3, 7]
    with pytest.raises(ValueError):
        next_prime_list([4], 1)
