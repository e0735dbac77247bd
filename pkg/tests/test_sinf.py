from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundgen.errors import DegenerateOrientation, NotAPartition, NotInfinite, NotReversible
from boundgen.sinf import (
    base_involution,
    blockwise_assemble,
    cond_c_express_perm,
    five_factor_decompose_perm,
    involution_certificate,
    involution_conjugator,
    involution_factorize,
    mod3_partition,
    pad_involution,
    support_in,
)
from boundgen.tailperm import ClassSet, TailPermutation, random_tail_permutation, shift_permutation
from boundgen.words import verify

seeds = st.integers(0, 2**32)
W = shift_permutation(3, (1, 1, -2))
P1, P2, P3 = mod3_partition()
EVERY = ClassSet.everything()
# one Z-orbit ... 5 -> 3 -> 1 -> 0 -> 2 -> 4 ... with equal speeds at both ends
ZIGZAG = TailPermutation.build(2, (2, -2), 2, lambda x: [2, 0][x])
# forward speed 3 on class 0, backward speed 4 on class 2: not conjugate to its inverse
IRREVERSIBLE = TailPermutation.build(3, (3, 1, -4), 3, lambda x: [3, 2, 0][x])


def pointwise_equal(a, b, n=300):
    return all(a(x) == b(x) for x in range(n))


def compose_all(perms):
    out = TailPermutation.identity()
    for p in perms:
        out = out.compose(p)
    return out


def reversible(seed):
    """Product of two conjugates of the base involution."""
    rng = np.random.default_rng(seed)
    base = base_involution()
    w1, w2 = (random_tail_permutation(rng, 4, 12) for _ in range(2))
    return w1.compose(base).compose(w1.inverse()).compose(w2.compose(base).compose(w2.inverse()))


def test_support_in_examples():
    assert support_in(TailPermutation.identity(), P1) == (True, None)
    assert support_in(TailPermutation.from_finite({0: 1, 1: 0}), P1 | P2) == (True, None)
    # 2 -> 0 moves a point outside {0, 1} mod 3
    assert support_in(W, P1 | P2) == (False, 2)


@pytest.mark.parametrize("u", [
    TailPermutation.identity(),
    TailPermutation.from_finite({0: 1, 1: 0}),
    W,
])
def test_five_factor_perm_examples(u):
    cert = five_factor_decompose_perm(u, P1, P2, P3)
    factors = [letter.payload for letter in cert.letters]
    assert compose_all(factors) == u
    assert pointwise_equal(compose_all(factors), u, 200)
    for letter in cert.letters:
        assert support_in(letter.payload, letter.support)[0]
    assert verify(cert).ok


def test_five_factor_perm_identity_gives_identities():
    cert = five_factor_decompose_perm(TailPermutation.identity(), P1, P2, P3)
    assert all(letter.payload.is_identity() for letter in cert.letters)


@given(seeds)
def test_five_factor_perm_random(seed):
    u = random_tail_permutation(np.random.default_rng(seed))
    cert = five_factor_decompose_perm(u, P1, P2, P3)
    assert cert.meta["orientation"] == "standard"
    assert [letter.tag for letter in cert.letters] == ["B", "A", "B", "A", "B"]
    assert compose_all(letter.payload for letter in cert.letters) == u
    assert verify(cert).ok


def test_five_factor_perm_mirrored():
    # P1 has three classes mod 6, P2 one: u pushes two classes of P1 into P2 + P3,
    # but only one class of P3 into P1 + P2
    q1 = ClassSet.residue_classes(6, [0, 1, 2])
    q2 = ClassSet.residue_classes(6, [3])
    q3 = ClassSet.residue_classes(6, [4, 5])
    u = shift_permutation(6, (3, 4, 0, -2, 0, -5))
    cert = five_factor_decompose_perm(u, q1, q2, q3)
    assert cert.meta["orientation"] == "mirrored"
    assert [letter.tag for letter in cert.letters] == ["A", "B", "A", "B", "A"]
    assert verify(cert).ok


def test_five_factor_perm_both_orientations_fail():
    # unequal densities: u swaps P1 = {0,1} mod 5 with P3 = {3,4} mod 5, P2 = {2} mod 5 is too thin
    q1 = ClassSet.residue_classes(5, [0, 1])
    q2 = ClassSet.residue_classes(5, [2])
    q3 = ClassSet.residue_classes(5, [3, 4])
    u = shift_permutation(5, (3, 3, 0, -3, -3))
    with pytest.raises(DegenerateOrientation):
        five_factor_decompose_perm(u, q1, q2, q3)


def test_five_factor_perm_partition_errors():
    with pytest.raises(NotAPartition):
        five_factor_decompose_perm(W, P1, P1, P3)
    with pytest.raises(NotAPartition):
        five_factor_decompose_perm(W, P1, P2, P2)
    with pytest.raises(NotInfinite):
        five_factor_decompose_perm(W, (P1 | P2) - ClassSet.finite([0]), ClassSet.finite([0]), P3)


def test_involution_of_involution():
    a = TailPermutation.from_finite({0: 3, 3: 0, 5: 6, 6: 5})
    i1, i2 = involution_factorize(a)
    assert i1 == a and i2.is_identity()


def test_involution_three_cycle():
    a = TailPermutation.from_finite({0: 1, 1: 2, 2: 0})
    i1, i2 = involution_factorize(a)
    assert i1 == TailPermutation.from_finite({0: 1, 1: 0})
    assert i2 == TailPermutation.from_finite({1: 2, 2: 1})
    assert [i1(i2(x)) for x in range(3)] == [1, 2, 0]


@pytest.mark.parametrize("a", [W, ZIGZAG, W.compose(ZIGZAG)], ids=["shift", "zigzag", "mixed"])
def test_involution_factorize_structured(a):
    i1, i2 = involution_factorize(a)
    assert i1.compose(i2) == a
    assert i1.is_involution() and i2.is_involution()
    for x in range(300):
        assert i1(i2(x)) == a(x)
        assert i1(i1(x)) == x and i2(i2(x)) == x
    sup = a.support()
    assert i1.support().issubset(sup) and i2.support().issubset(sup)


@given(seeds)
def test_involution_factorize_reversible(seed):
    a = reversible(seed)
    i1, i2 = involution_factorize(a)
    assert i1.compose(i2) == a
    assert i1.is_involution() and i2.is_involution()


@given(seeds)
def test_involution_factorize_random_or_irreversible(seed):
    a = random_tail_permutation(np.random.default_rng(seed))
    try:
        i1, i2 = involution_factorize(a)
    except NotReversible:
        return
    assert i1.compose(i2) == a and i1.is_involution() and i2.is_involution()


def empirical_speeds(a, start, steps=3000):
    """Average step length of the orbit of ``start`` far forward and far backward."""
    ainv = a.inverse()
    fwd, back = start, start
    for _ in range(steps):
        fwd = a(fwd)
    mid_f = fwd
    for _ in range(steps):
        fwd = a(fwd)
    for _ in range(steps):
        back = ainv(back)
    mid_b = back
    for _ in range(steps):
        back = ainv(back)
    return Fraction(fwd - mid_f, steps), Fraction(back - mid_b, steps)


def test_irreversible_counterexample():
    with pytest.raises(NotReversible):
        involution_factorize(IRREVERSIBLE)
    # independent check by walking: every infinite orbit meets [0, 3); none has swapped speeds
    pairs = {empirical_speeds(IRREVERSIBLE, x) for x in range(3)}
    assert all((b, f) not in pairs for f, b in pairs if f != b)


def test_base_involution_natural():
    base = base_involution()
    assert [base(x) for x in range(10)] == [1, 0, 2, 3, 5, 4, 6, 7, 9, 8]


@given(seeds)
def test_padding_halves(seed):
    a = reversible(seed)
    for i in involution_factorize(a):
        j = pad_involution(i)
        assert j.is_involution()
        assert j.compose(i) == i.compose(j)
        for g in (j, i.compose(j)):
            assert g.support().density == Fraction(1, 2)


def test_conjugator_to_base():
    base = base_involution()
    j = pad_involution(TailPermutation.from_finite({0: 7, 7: 0}))
    w = involution_conjugator(base, j)
    assert w.compose(base).compose(w.inverse()) == j


@pytest.mark.parametrize("a", [W, ZIGZAG, TailPermutation.from_finite({0: 1, 1: 2, 2: 0})])
def test_involution_certificate(a):
    cert = involution_certificate(a)
    assert cert.measured_length == 4
    assert verify(cert).ok
    base = cert.base
    for letter in cert.letters:
        w = letter.conjugator
        assert w.compose(base).compose(w.inverse()) == letter.payload


def test_involution_certificate_in_universe():
    s = P1 | P2
    a = TailPermutation.from_finite({0: 4, 4: 1, 1: 0})
    cert = involution_certificate(a, s)
    assert verify(cert).ok
    for letter in cert.letters:
        assert support_in(letter.conjugator, s)[0]
        assert support_in(letter.payload, s)[0]


def test_cond_c_examples():
    u = TailPermutation.from_finite({0: 3, 3: 0})
    cert = cond_c_express_perm(u)
    assert cert.measured_length == 1 and verify(cert).ok
    cert = cond_c_express_perm(TailPermutation.from_finite({0: 1, 1: 0}))
    assert cert.measured_length == 1
    cert = cond_c_express_perm(TailPermutation.from_finite({0: 2, 2: 0}))
    assert cert.measured_length <= 11 and verify(cert).ok
    assert cert.paper_bound == 8
    assert cert.generators[0] == W


def test_cond_c_word_shape():
    cert = cond_c_express_perm(W)
    gens = [letter for letter in cert.letters if letter.tag == "generator"]
    assert cert.measured_length == 11 and len(gens) == 6
    p = P1 | P2
    for letter in cert.letters:
        if letter.tag == "element":
            assert support_in(letter.payload, p)[0]
    assert verify(cert).ok


def test_cond_c_general_p():
    p = ClassSet.residue_classes(4, [0, 1, 2])
    u = TailPermutation.from_finite({3: 0, 0: 3})
    cert = cond_c_express_perm(u, p)
    assert verify(cert).ok
    w = cert.generators[0]
    assert w.image(p) != p


def test_blockwise_assemble():
    blocks = [
        (ClassSet.residue_classes(3, [0]), TailPermutation.from_finite({0: 3, 3: 0})),
        (ClassSet.residue_classes(3, [1]), TailPermutation.from_finite({1: 4, 4: 1})),
        (ClassSet.residue_classes(3, [2]), TailPermutation.identity()),
    ]
    g = blockwise_assemble(blocks)
    for block, h in blocks:
        assert g.restrict(block) == h.restrict(block)
    with pytest.raises(NotAPartition):
        blockwise_assemble(blocks[:2])
