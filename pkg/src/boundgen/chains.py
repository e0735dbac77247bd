"""Exhaustive chains W_1 <= W_2 <= ... and the search for fullness witnesses.

A projection p is full for W when every g in G(p) agrees on p with some
h in W. Only the definition is executable: the search below looks for
witnesses for a finite sample of elements, never for all of G(p).
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import OracleExhausted
from .matrix_core import DEFAULT_TOL, adjoint, hermitian_eigendecompose, operator_norm, polar_unitary
from .tailperm import ClassSet, TailPermutation

LEVEL_CAP = 10**4


@dataclass(frozen=True)
class ChainOracle:
    """Membership in W_n, optionally with an enumerator of the layer W_n minus W_{n-1}."""

    name: str
    membership: object
    enumerator: object = None
    monotone: bool = True

    def contains(self, g, n):
        return bool(self.membership(g, n))

    def level_of(self, g, cap=LEVEL_CAP):
        """Least n with g in W_n."""
        for n in range(1, cap + 1):
            if self.membership(g, n):
                return n
        raise OracleExhausted(f"{self.name}: element not in W_n for n <= {cap}")


def trivial_chain():
    """W_1 = G."""
    return ChainOracle("trivial", lambda g, n: True)


def norm_ball_chain(step=0.1, slack=1e-12):
    """W_n = {u : ||u - 1|| <= n step} on a unitary group."""

    def member(u, n):
        return operator_norm(u - np.eye(u.shape[0])) <= n * step + slack

    return ChainOracle(f"norm_ball({step})", member)


def tail_complexity_chain():
    """W_n = {a : complexity(a) <= n} on the tail-permutation group."""
    return ChainOracle("tail_complexity", lambda a, n: a.complexity() <= n)


class _CayleyBall:
    def __init__(self, generators, size):
        self.size = size
        gens = [tuple(g) for g in generators]
        inv = []
        for g in gens:
            h = [0] * size
            for x, y in enumerate(g):
                h[y] = x
            inv.append(tuple(h))
        self.steps = gens + inv
        start = tuple(range(size))
        self.dist = {start: 0}
        self.layers = [[start]]
        queue = deque([start])
        while queue:
            x = queue.popleft()
            d = self.dist[x]
            for s in self.steps:
                y = tuple(s[x[i]] for i in range(size))
                if y not in self.dist:
                    self.dist[y] = d + 1
                    if len(self.layers) <= d + 1:
                        self.layers.append([])
                    self.layers[d + 1].append(y)
                    queue.append(y)

    def images(self, a):
        return tuple(a(x) for x in range(self.size))


def cayley_ball_chain(generators, size=8):
    """W_n = words of length <= n over the generators and their inverses, inside S_size.

    Elements are TailPermutations moving only points below ``size``; the
    chain exhausts the subgroup the generators generate.
    """
    ball = _CayleyBall(generators, size)

    def member(a, n):
        if a.T > size or a.m != 1 or a.offsets != (0,):
            return False
        d = ball.dist.get(ball.images(a))
        return d is not None and d + 1 <= n

    def layer(n):
        if n - 1 < len(ball.layers):
            for t in ball.layers[n - 1]:
                yield TailPermutation.from_images(list(t))

    return ChainOracle(f"cayley_ball(S{size})", member, layer)


def canonical_completion(g, p):
    """h with h p = g p, completed off p by the polar factor of the natural alignment.

    For a permutation the restriction to S of an element of G(S) is already
    a bijection, so g itself is returned.
    """
    if isinstance(g, TailPermutation):
        return g
    v = g @ p.basis
    q = np.eye(p.dim) - v @ adjoint(v)
    w, y = hermitian_eigendecompose(0.5 * (q + adjoint(q)))
    y = y[:, w > 0.5]
    bc = p.complement().basis
    x = y @ polar_unitary(adjoint(y) @ bc)
    return v @ adjoint(p.basis) + x @ adjoint(bc)


def agrees_on(g, h, p, tol=DEFAULT_TOL):
    """The fullness condition g p = h p."""
    if isinstance(p, ClassSet):
        return h.inverse().compose(g).support().intersection(p).is_empty()
    return operator_norm((g - h) @ p.basis) <= tol.tol_residual


@dataclass
class Witness:
    g: object
    h: object
    level: int
    residual: float = 0.0


@dataclass
class FullnessReport:
    level: int
    witnesses: list = field(repr=False)
    sample_size: int = 0
    note: str = "sample-based: witnesses exist for the sampled elements only, not for all of G(p)"

    def to_json(self):
        return {
            "level": self.level,
            "sample_size": self.sample_size,
            "levels": [w.level for w in self.witnesses],
            "max_residual": max((w.residual for w in self.witnesses), default=0.0),
            "note": self.note,
        }


def find_witness(oracle, p, g, cap=LEVEL_CAP, tol=DEFAULT_TOL):
    if oracle.enumerator is not None:
        for n in range(1, cap + 1):
            layer = list(oracle.enumerator(n))
            if not layer and n > 1:
                break
            for h in layer:
                if agrees_on(g, h, p, tol):
                    return Witness(g, h, n)
        raise OracleExhausted(f"{oracle.name}: no element agrees with g on p")
    h = canonical_completion(g, p)
    n = oracle.level_of(h, cap)
    residual = 0.0 if isinstance(p, ClassSet) else operator_norm((g - h) @ p.basis)
    if not agrees_on(g, h, p, tol):
        raise OracleExhausted("canonical completion does not agree with g on p")
    return Witness(g, h, n, residual)


def fullness_search(oracle, p, sample, cap=LEVEL_CAP, tol=DEFAULT_TOL):
    """Least level n such that every sampled g agrees on p with some h in W_n."""
    witnesses = [find_witness(oracle, p, g, cap, tol) for g in sample]
    level = max((w.level for w in witnesses), default=1)
    return FullnessReport(level, witnesses, len(witnesses))


def conjugation_agrees(w, h, g, model_tol=DEFAULT_TOL):
    """h g h^{-1} = w g w^{-1}: what a witness with h p = w p buys for g in G(p)."""
    if isinstance(g, TailPermutation):
        return h.compose(g).compose(h.inverse()) == w.compose(g).compose(w.inverse())
    return operator_norm(h @ g @ adjoint(h) - w @ g @ adjoint(w)) <= model_tol.tol_residual


def spot_check_chain(oracle, sample, levels=range(1, 6), inverse=None):
    """Monotonicity and symmetry on a sample; returns a list of violations."""
    bad = []
    for g in sample:
        for n in levels:
            if oracle.contains(g, n) and not oracle.contains(g, n + 1):
                bad.append(("monotone", n))
            if inverse is not None and oracle.contains(g, n) != oracle.contains(inverse(g), n):
                bad.append(("symmetric", n))
    return bad

