import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundgen.assemble import assemble_3nm, collect_witnesses, symbolic_3nm, symbolic_length
from boundgen.chains import norm_ball_chain, tail_complexity_chain
from boundgen.errors import IncompatibleProjections, MissingWitness
from boundgen.finite import ladder_build, ladder_express, random_in_corner, symmetry_factorize
from boundgen.matrix_core import operator_norm, random_unitary
from boundgen.projections import CornerContext
from boundgen.sinf import cond_c_express_perm, involution_certificate, mod3_partition
from boundgen.tailperm import TailPermutation
from boundgen.words import verify


def matrix_pipeline(d, n, seed):
    ladder = ladder_build(d, n)
    c = ladder_express(random_unitary(d, seed), ladder)
    ctx = CornerContext(ladder.q0)
    bs = [symmetry_factorize(letter.payload, ctx) for letter in c.letters if letter.tag == "element"]
    return ladder, c, bs


def test_symbolic_examples():
    assert symbolic_3nm(1, 1) == 3
    assert symbolic_3nm(4, 8) == 96
    assert symbolic_3nm(4, 11) == 132
    with pytest.raises(ValueError):
        symbolic_3nm(0, 3)


@given(st.integers(1, 20), st.integers(1, 20))
def test_symbolic_worst_case(n, m):
    assert symbolic_length(["element"] * m, n) == symbolic_3nm(n, m) == 3 * n * m
    assert symbolic_length(["generator"] * m, n) <= 3 * n * m


def test_matrix_assembly():
    ladder, c, bs = matrix_pipeline(3, 1, 4)
    wit, level = collect_witnesses(bs, norm_ball_chain())
    out = assemble_3nm(c, bs, wit)
    assert out.measured_length <= out.claimed_bound == 3 * 2 * 11
    assert verify(out).ok
    assert operator_norm(out.target - c.target) == 0


def test_matrix_assembly_with_foreign_witnesses():
    # witnesses that differ from the conjugators off the corner still work
    ladder, c, bs = matrix_pipeline(9, 2, 8)
    rng = np.random.default_rng(0)
    comp = ladder.q0.complement()
    wit = {}
    for k, cert in enumerate(bs):
        for i, letter in enumerate(cert.letters):
            wit[(k, i)] = letter.conjugator @ random_in_corner(comp, rng)
    out = assemble_3nm(c, bs, wit)
    assert verify(out).ok


def test_missing_and_wrong_witness():
    ladder, c, bs = matrix_pipeline(3, 1, 5)
    wit, _ = collect_witnesses(bs, norm_ball_chain())
    key = next(iter(wit))
    broken = dict(wit)
    del broken[key]
    with pytest.raises(MissingWitness):
        assemble_3nm(c, bs, broken)
    broken = dict(wit)
    broken[key] = random_unitary(3, 1)
    with pytest.raises(MissingWitness):
        assemble_3nm(c, bs, broken)


def test_incompatible_expansions():
    ladder, c, bs = matrix_pipeline(3, 1, 6)
    with pytest.raises(IncompatibleProjections):
        assemble_3nm(c, bs[:-1], {})
    swapped = [bs[1], bs[0]] + bs[2:]
    with pytest.raises(IncompatibleProjections):
        assemble_3nm(c, swapped, {})


def test_perm_assembly():
    p1, p2, _ = mod3_partition()
    p = p1 | p2
    c = cond_c_express_perm(TailPermutation.from_finite({0: 5, 5: 2, 2: 0}))
    bs = [involution_certificate(letter.payload, p) for letter in c.letters if letter.tag == "element"]
    wit, level = collect_witnesses(bs, tail_complexity_chain())
    out = assemble_3nm(c, bs, wit, paper_bound=96)
    assert out.claimed_bound == 132 and out.paper_bound == 96
    assert out.measured_length <= 132
    assert verify(out).ok
