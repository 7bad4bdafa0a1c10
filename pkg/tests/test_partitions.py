import pytest
from hypothesis import given, settings, strategies as st

from bvcorr.partitions import (
    ArityCapError,
    bell_number,
    koszul_sign,
    set_partitions,
    sort_sign,
)


def test_p1():
    assert set_partitions(1) == (((1,),),)


def test_p3_contents():
    got = set(set_partitions(3))
    want = {
        ((1, 2, 3),),
        ((1, 2), (3,)),
        ((2,), (1, 3)),
        ((1,), (2, 3)),
        ((1,), (2,), (3,)),
    }
    assert got == want


def test_block_ordering_and_determinism():
    for p in set_partitions(4):
        maxes = [max(b) for b in p]
        assert maxes == sorted(maxes)
        for b in p:
            assert list(b) == sorted(b)
    assert set_partitions(4) == set_partitions(4)


@pytest.mark.parametrize("n,bell", [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203), (7, 877)])
def test_bell_counts(n, bell):
    assert bell_number(n) == bell
    assert len(set_partitions(n)) == bell


def test_arity_cap():
    with pytest.raises(ArityCapError):
        set_partitions(8)


def test_koszul_sign_all_even():
    for p in set_partitions(4):
        assert koszul_sign(p, [0, 2, 0, -2]) == 1


def test_koszul_sign_single_transposition():
    # {2} u {1,3} reorders (1,2,3) -> (2,1,3): one odd transposition
    p = ((2,), (1, 3))
    assert koszul_sign(p, [1, 1, 0]) == -1
    assert koszul_sign(p, [1, 1, 1]) == -1
    assert koszul_sign(p, [0, 1, 0]) == 1


def test_koszul_identity_partition():
    assert koszul_sign(((1, 2, 3, 4),), [1, 1, 1, 1]) == 1


def _bubble_oracle(perm, degrees):
    # independent transposition-counting oracle
    arr = list(perm)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1):
            if arr[j] > arr[j + 1]:
                if degrees[arr[j] - 1] % 2 and degrees[arr[j + 1] - 1] % 2:
                    sign = -sign
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
    return sign


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.data())
def test_koszul_against_bubble_sort(n, data):
    degrees = data.draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    parts = set_partitions(n)
    p = parts[data.draw(st.integers(0, len(parts) - 1))]
    perm = [i for b in p for i in b]
    assert koszul_sign(p, degrees) == _bubble_oracle(perm, degrees)


def test_swapping_even_elements_keeps_sign():
    # multiplicativity: a further swap of two even slots changes nothing
    degrees = [1, 0, 0, 1]
    p = ((2,), (1, 3), (4,))
    q = ((3,), (1, 2), (4,))  # exchanges the two even elements 2 and 3
    assert koszul_sign(p, degrees) == koszul_sign(q, degrees)


def test_sort_sign_odd_square_vanishes():
    idxs, sign = sort_sign((2, 2), [1, 1])
    assert sign == 0
    idxs, sign = sort_sign((3, 1), [1, 1])
    assert idxs == (1, 3) and sign == -1
