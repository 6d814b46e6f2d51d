import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mbp4 import gf2


def rank_oracle(bits):
    """Rank by elimination on Python integers used as bit sets."""
    rows = [int("".join(map(str, r)), 2) if len(r) else 0 for r in bits.tolist()]
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


matrices = st.tuples(st.integers(1, 12), st.integers(1, 140)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))
)


@given(matrices)
def test_pack_round_trip(bits):
    assert np.array_equal(gf2.unpack(gf2.pack(bits), bits.shape[1]), bits)


@given(matrices)
def test_rank_matches_oracle(bits):
    assert gf2.rank(bits) == rank_oracle(bits)


@given(matrices)
def test_nullspace(bits):
    ns = gf2.nullspace(bits)
    assert ns.shape == (bits.shape[1] - gf2.rank(bits), bits.shape[1])
    assert not ((bits.astype(int) @ ns.T.astype(int)) % 2).any()
    assert gf2.rank(ns) == ns.shape[0]


@given(matrices, st.randoms())
def test_membership(bits, rnd):
    ech = gf2.echelon(bits)
    coeffs = np.array([rnd.randint(0, 1) for _ in range(bits.shape[0])], dtype=int)
    combo = (coeffs @ bits.astype(int)) % 2
    assert ech.contains(combo[None, :])[0]
    other = np.array([rnd.randint(0, 1) for _ in range(bits.shape[1])], dtype=np.uint8)
    expected = rank_oracle(np.vstack([bits, other])) == rank_oracle(bits)
    assert ech.contains(other[None, :])[0] == expected


def test_echelon_shape():
    bits = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
    ech = gf2.echelon(bits)
    assert ech.rank == 2
    assert ech.pivots.tolist() == [0, 1]
