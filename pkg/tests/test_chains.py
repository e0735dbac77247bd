import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundgen.chains import (
    ChainOracle,
    agrees_on,
    canonical_completion,
    cayley_ball_chain,
    conjugation_agrees,
    fullness_search,
    norm_ball_chain,
    spot_check_chain,
    tail_complexity_chain,
    trivial_chain,
)
from boundgen.errors import OracleExhausted
from boundgen.finite import random_in_corner
from boundgen.matrix_core import operator_norm, random_unitary
from boundgen.projections import Projection
from boundgen.tailperm import ClassSet, TailPermutation, random_tail_permutation

seeds = st.integers(0, 2**32)
# a transposition and an 8-cycle generate S_8
GENS = [[1, 0, 2, 3, 4, 5, 6, 7], [1, 2, 3, 4, 5, 6, 7, 0]]


def test_trivial_chain_level_one():
    p = Projection.coordinate(3, [0])
    sample = [random_in_corner(p, np.random.default_rng(s)) for s in range(5)]
    assert fullness_search(trivial_chain(), p, sample).level == 1


def test_norm_ball_level_bounded():
    p = Projection.from_basis(random_unitary(3, 1)[:, :1])
    sample = [random_in_corner(p, np.random.default_rng(s)) for s in range(20)]
    report = fullness_search(norm_ball_chain(), p, sample)
    # every unitary is within distance 2 of the identity
    assert report.level <= 20
    for w in report.witnesses:
        assert operator_norm((w.g - w.h) @ p.basis) <= 1e-8


@given(seeds, st.integers(2, 6))
def test_canonical_completion_agrees_and_is_unitary(seed, d):
    p = Projection.from_basis(random_unitary(d, seed)[:, : d // 2])
    g = random_unitary(d, seed + 1)
    h = canonical_completion(g, p)
    assert operator_norm(h @ h.conj().T - np.eye(d)) <= 1e-10
    assert agrees_on(g, h, p)


def test_norm_ball_chain_spot_checks():
    sample = [random_unitary(3, s) for s in range(10)]
    assert spot_check_chain(norm_ball_chain(), sample, range(1, 25), lambda u: u.conj().T) == []


def test_cayley_ball_matches_brute_force():
    oracle = cayley_ball_chain(GENS)
    ball = oracle.enumerator
    sizes = [len(list(ball(n))) for n in range(1, 4)]
    # independent brute force over words of length <= 2
    steps = [tuple(g) for g in GENS]
    inv = [tuple(sorted(range(8), key=lambda i: g[i])) for g in steps]
    words = {tuple(range(8))}
    frontier = set(words)
    seen = [1]
    for _ in range(2):
        new = set()
        for x in frontier:
            for s in steps + inv:
                y = tuple(s[x[i]] for i in range(8))
                if y not in words:
                    new.add(y)
        words |= new
        frontier = new
        seen.append(len(new))
    assert sizes == seen


def test_cayley_fullness():
    oracle = cayley_ball_chain(GENS)
    p = ClassSet.finite([0, 1, 2])
    sample = [TailPermutation.from_images(list(q) + list(range(3, 8))) for q in itertools.permutations(range(3))]
    report = fullness_search(oracle, p, sample)
    assert report.level >= 1
    for w in report.witnesses:
        assert all(w.g(x) == w.h(x) for x in range(3))
        assert oracle.contains(w.h, w.level) and (w.level == 1 or not oracle.contains(w.h, w.level - 1))


def test_oracle_exhausted():
    never = ChainOracle("never", lambda g, n: False)
    p = Projection.coordinate(2, [0])
    with pytest.raises(OracleExhausted):
        fullness_search(never, p, [np.eye(2)], cap=50)
    oracle = cayley_ball_chain([[0, 1, 2, 3, 4, 5, 6, 7]])
    with pytest.raises(OracleExhausted):
        fullness_search(oracle, ClassSet.finite([0]), [TailPermutation.from_finite({0: 1, 1: 0})])


@given(seeds)
def test_tail_complexity_chain(seed):
    a = random_tail_permutation(np.random.default_rng(seed))
    oracle = tail_complexity_chain()
    assert spot_check_chain(oracle, [a], range(1, 40), lambda x: x.inverse()) == []
    s = a.support()
    report = fullness_search(oracle, s, [a])
    assert report.witnesses[0].h == a


@given(seeds)
def test_conjugation_depends_only_on_corner(seed):
    # h p = w p and g in G(p) give h g h* = w g w*
    d = 5
    p = Projection.from_basis(random_unitary(d, seed)[:, :2])
    rng = np.random.default_rng(seed)
    g = random_in_corner(p, rng)
    w = random_unitary(d, seed + 1)
    h = canonical_completion(w, p)
    off = random_in_corner(p.complement(), rng)
    assert conjugation_agrees(w, h, g)
    assert conjugation_agrees(w, h @ off, g)
