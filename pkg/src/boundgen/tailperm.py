"""Computable permutations of the naturals that are eventually residue-class translations.

A :class:`TailPermutation` acts as ``x -> x + offsets[x % m]`` for ``x >= T``
and by an explicit table below ``T``. A :class:`ClassSet` is a union of
residue classes modulo ``m`` corrected by finitely many added and removed
points. Both are kept in a canonical form (minimal modulus, minimal
threshold), so structural equality decides equality.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

from .errors import DensityMismatch, InvalidInput


def lcm(*ns):
    return reduce(lambda a, b: a * b // gcd(a, b), ns, 1)


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _minimal_period(values):
    n = len(values)
    for d in _divisors(n):
        if all(values[i] == values[i % d] for i in range(n)):
            return d
    return n


@dataclass(frozen=True)
class TailPermutation:
    m: int
    offsets: tuple
    T: int
    table: tuple

    def __post_init__(self):
        if self.m < 1 or len(self.offsets) != self.m:
            raise InvalidInput("offsets must have exactly m entries")
        if self.T < 0 or len(self.table) != self.T:
            raise InvalidInput("table must list images of 0..T-1")
        self._validate()

    # construction -----------------------------------------------------

    @classmethod
    def identity(cls):
        return cls(1, (0,), 0, ())

    @classmethod
    def build(cls, m, offsets, T, func):
        """Canonical permutation equal to ``func`` below ``T`` and to the tail formula above."""
        offsets = tuple(int(c) for c in offsets)
        table = [int(func(x)) for x in range(T)]
        return cls._canonical(m, offsets, T, table)

    @classmethod
    def from_pointwise(cls, func, m, T):
        """Read off tail offsets from ``func`` on [T, T + m) and check them on a longer window."""
        offsets = [func(x) - x for x in range(T, T + m)]
        # offsets[i] belongs to residue (T + i) % m
        by_res = [0] * m
        for i, c in enumerate(offsets):
            by_res[(T + i) % m] = c
        for x in range(T + m, T + 3 * m):
            if func(x) != x + by_res[x % m]:
                raise InvalidInput(f"pointwise map is not a translation past {T} mod {m}")
        return cls.build(m, by_res, T, func)

    @classmethod
    def from_finite(cls, mapping):
        """Permutation moving finitely many points, given as a dict."""
        T = max((max(k, v) for k, v in mapping.items()), default=-1) + 1
        return cls.build(1, (0,), T, lambda x: mapping.get(x, x))

    @classmethod
    def from_images(cls, images):
        """Permutation of [0, n) listed as images, identity beyond."""
        return cls.build(1, (0,), len(images), lambda x: images[x])

    @classmethod
    def _canonical(cls, m, offsets, T, table):
        period = _minimal_period(offsets)
        offsets = tuple(offsets[:period])
        m = period
        while T > 0 and table[T - 1] == (T - 1) + offsets[(T - 1) % m]:
            T -= 1
        return cls(m, offsets, T, tuple(table[:T]))

    def _validate(self):
        m, c, T = self.m, self.offsets, self.T
        sigma = [(r + c[r]) % m for r in range(m)]
        if sorted(sigma) != list(range(m)):
            raise InvalidInput("class map is not a permutation of residues")
        for r in range(m):
            first = T + ((r - T) % m)
            if first + c[r] < 0:
                raise InvalidInput(f"tail of class {r} maps below zero")
        hi = max(c) if m else 0
        window = T + max(0, hi) + m
        lo = min(0, min(c))
        tail_image = set()
        for x in range(T, window - lo + m):
            y = x + c[x % m]
            if y < window:
                tail_image.add(y)
        rest = [y for y in range(window) if y not in tail_image]
        if sorted(self.table) != rest:
            raise InvalidInput("finite table does not biject onto the complement of the tail image")

    # evaluation -------------------------------------------------------

    def __call__(self, x):
        if x < self.T:
            return self.table[x]
        return x + self.offsets[x % self.m]

    apply = __call__

    @property
    def sigma(self):
        return tuple((r + self.offsets[r]) % self.m for r in range(self.m))

    @property
    def max_shift(self):
        return max(abs(c) for c in self.offsets)

    def is_identity(self):
        return self.m == 1 and self.offsets == (0,) and self.T == 0

    def complexity(self):
        """max(T, m, max |offset|, threshold of the inverse): symmetric under inversion."""
        inv = self.inverse()
        return max(self.T, inv.T, self.m, self.max_shift)

    # group operations -------------------------------------------------

    def compose(self, other):
        """self o other (apply ``other`` first)."""
        a, b = self, other
        M = lcm(a.m, b.m)
        offs = []
        for R in range(M):
            cb = b.offsets[R % b.m]
            offs.append(cb + a.offsets[(R + cb) % a.m])
        T = max(b.T, a.T - min(0, min(b.offsets)))
        return TailPermutation.build(M, offs, T, lambda x: a(b(x)))

    __matmul__ = compose

    def inverse(self):
        m, c, T = self.m, self.offsets, self.T
        sig = self.sigma
        pre = [0] * m
        for r in range(m):
            pre[sig[r]] = r
        inv_off = [-c[pre[s]] for s in range(m)]
        T_inv = T + max(0, max(c)) + m
        back = {y: x for x, y in enumerate(self.table)}

        def f(y):
            if y in back:
                return back[y]
            return y - c[pre[y % m]]

        return TailPermutation.build(m, inv_off, T_inv, f)

    def power(self, k):
        result = TailPermutation.identity()
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = result.compose(base)
        return result

    def support(self):
        """ClassSet of moved points."""
        m = self.m
        moving = frozenset(r for r in range(m) if self.offsets[r] != 0)
        return ClassSet.from_membership(m, moving, self.T, lambda x: self(x) != x)

    def image(self, s):
        """self(S) as a ClassSet."""
        inv = self.inverse()
        M = lcm(self.m, s.m)
        res = frozenset(R for R in range(M) if (R + inv.offsets[R % inv.m]) % s.m in s.residues)
        bound = max(inv.T, s.bound - min(0, min(inv.offsets))) + M
        return ClassSet.from_membership(M, res, bound, lambda y: s.contains(inv(y)))

    def restrict(self, s):
        """Equal to self on S and the identity elsewhere; requires self(S) = S."""
        M = lcm(self.m, s.m)
        offs = [self.offsets[R % self.m] if R % s.m in s.residues else 0 for R in range(M)]
        T = max(self.T, s.bound)
        return TailPermutation.build(M, offs, T, lambda x: self(x) if s.contains(x) else x)

    def is_involution(self):
        return self.compose(self).is_identity()

    # serialization ----------------------------------------------------

    def to_json(self):
        return {
            "m": self.m,
            "sigma": list(self.sigma),
            "offsets": list(self.offsets),
            "T": self.T,
            "table": [[x, y] for x, y in enumerate(self.table)],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            m = int(obj["m"])
            offsets = [int(c) for c in obj["offsets"]]
            T = int(obj["T"])
            pairs = {int(x): int(y) for x, y in obj["table"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad permutation JSON: {exc}") from exc
        if sorted(pairs) != list(range(T)):
            raise InvalidInput("table must cover 0..T-1")
        p = cls.build(m, offsets, T, lambda x: pairs[x])
        if "sigma" in obj and len(obj["sigma"]) == m:
            if tuple((r + offsets[r]) % m for r in range(m)) != tuple(obj["sigma"]):
                raise InvalidInput("sigma inconsistent with offsets")
        return p


@dataclass(frozen=True)
class ClassSet:
    """(union of residue classes mod m, plus ``plus``) minus ``minus``."""

    m: int
    residues: frozenset
    plus: frozenset = frozenset()
    minus: frozenset = frozenset()

    @classmethod
    def from_membership(cls, m, residues, bound, pred):
        """Canonical ClassSet agreeing with ``pred`` below ``bound`` and with the residues above."""
        residues = frozenset(residues)
        plus = set()
        minus = set()
        for x in range(bound):
            inside = pred(x)
            if inside and x % m not in residues:
                plus.add(x)
            elif not inside and x % m in residues:
                minus.add(x)
        return cls._canonical(m, residues, plus, minus)

    @classmethod
    def _canonical(cls, m, residues, plus, minus):
        for d in _divisors(m):
            red = frozenset(r % d for r in residues)
            if all((R % d in red) == (R in residues) for R in range(m)):
                return cls(d, red, frozenset(plus), frozenset(minus))
        raise AssertionError("unreachable")

    @classmethod
    def residue_classes(cls, m, residues):
        return cls._canonical(m, frozenset(r % m for r in residues), (), ())

    @classmethod
    def finite(cls, points):
        return cls(1, frozenset(), frozenset(points), frozenset())

    @classmethod
    def everything(cls):
        return cls(1, frozenset({0}))

    @classmethod
    def empty(cls):
        return cls(1, frozenset())

    def contains(self, x):
        if x in self.plus:
            return True
        if x in self.minus:
            return False
        return x % self.m in self.residues

    __contains__ = contains

    @property
    def bound(self):
        """Past this point membership is decided by residues alone."""
        return max(self.plus | self.minus, default=-1) + 1

    @property
    def density(self):
        return Fraction(len(self.residues), self.m)

    def is_finite(self):
        return not self.residues

    def is_empty(self):
        return self.is_finite() and not self.plus

    def residues_mod(self, M):
        assert M % self.m == 0
        return frozenset(R for R in range(M) if R % self.m in self.residues)

    def _combine(self, other, op):
        M = lcm(self.m, other.m)
        a, b = self.residues_mod(M), other.residues_mod(M)
        res = frozenset(R for R in range(M) if op(R in a, R in b))
        bound = max(self.bound, other.bound)
        return ClassSet.from_membership(M, res, bound, lambda x: op(self.contains(x), other.contains(x)))

    def union(self, other):
        return self._combine(other, lambda s, t: s or t)

    def intersection(self, other):
        return self._combine(other, lambda s, t: s and t)

    def difference(self, other):
        return self._combine(other, lambda s, t: s and not t)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def complement(self):
        return ClassSet(self.m, frozenset(range(self.m)) - self.residues, self.minus, self.plus)

    def issubset(self, other):
        return self.difference(other).is_empty()

    def first_elements(self, k, start=0):
        out = []
        x = start
        while len(out) < k:
            if self.is_finite() and x >= self.bound:
                raise ValueError("not enough elements")
            if self.contains(x):
                out.append(x)
            x += 1
        return out

    def min_element(self):
        if self.is_empty():
            return None
        return self.first_elements(1)[0]

    def elements_below(self, n):
        return [x for x in range(n) if self.contains(x)]

    def finite_elements(self):
        if not self.is_finite():
            raise ValueError("infinite set")
        return sorted(self.plus)

    def to_json(self):
        return {
            "m": self.m,
            "residues": sorted(self.residues),
            "plus": sorted(self.plus),
            "minus": sorted(self.minus),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            m = int(obj["m"])
            res = frozenset(int(r) % m for r in obj["residues"])
            plus = [int(x) for x in obj.get("plus", [])]
            minus = [int(x) for x in obj.get("minus", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad class-set JSON: {exc}") from exc
        bound = max(plus + minus, default=-1) + 1
        plus_s, minus_s = set(plus), set(minus)

        def pred(x):
            if x in plus_s:
                return True
            if x in minus_s:
                return False
            return x % m in res

        return cls.from_membership(m, res, bound, pred)


def _match(a, b, M):
    """Order-preserving ray matching of A onto B.

    Returns (class offsets, per-class start of the translation, finite map).
    """
    if a.is_finite() or b.is_finite():
        if not (a.is_finite() and b.is_finite()):
            raise DensityMismatch("cannot match a finite set with an infinite one")
        xs, ys = a.finite_elements(), b.finite_elements()
        if len(xs) != len(ys):
            raise DensityMismatch(f"finite sets of sizes {len(xs)} and {len(ys)}")
        return {}, {}, dict(zip(xs, ys))
    ra = sorted(a.residues_mod(M))
    rb = sorted(b.residues_mod(M))
    if len(ra) != len(rb):
        raise DensityMismatch(f"densities {a.density} and {b.density} differ")
    H = max(a.bound, b.bound)
    H = -(-H // M) * M
    fa = a.elements_below(H)
    fb = b.elements_below(H)
    offsets = {r: s - r for r, s in zip(ra, rb)}
    delta = len(fa) - len(fb)
    starts = {r: H for r in ra}
    if delta > 0:
        # ray 0 of A lands delta blocks higher; the skipped B points join the finite part
        offsets[ra[0]] += delta * M
        fb += [rb[0] + H + t * M for t in range(delta)]
        fb.sort()
    elif delta < 0:
        fa += [ra[0] + H + t * M for t in range(-delta)]
        fa.sort()
        offsets[ra[0]] -= (-delta) * M
        starts[ra[0]] = H + (-delta) * M
    return offsets, starts, dict(zip(fa, fb))


def set_bijection(a, b, universe=None):
    """Tail permutation w with w(A) = B, w(U \\ A) = U \\ B, identity off U."""
    u = ClassSet.everything() if universe is None else universe
    M = lcm(a.m, b.m, u.m)
    off1, t1, fin1 = _match(a, b, M)
    off2, t2, fin2 = _match(u - a, u - b, M)
    finite = {**fin1, **fin2}
    offsets = [0] * M
    start = [0] * M
    for offs, st in ((off1, t1), (off2, t2)):
        for r, c in offs.items():
            offsets[r] = c
            start[r] = st[r]
    T = max(start + [u.bound, max(finite, default=-1) + 1])
    T = -(-T // M) * M

    def f(x):
        if x in finite:
            return finite[x]
        r = x % M
        if x >= start[r]:
            return x + offsets[r]
        return x

    return TailPermutation.build(M, offsets, T, f)


def shift_permutation(m, offsets):
    """Pure tail permutation with threshold 0."""
    return TailPermutation.build(m, offsets, 0, lambda x: x)


def random_tail_permutation(rng, max_modulus=6, max_table=30):
    """Random canonical TailPermutation with modulus <= max_modulus.

    Offsets are sigma(r) - r + m k_r with sum k_r = 0 (zero net flux is what
    makes the tail map co-finite). The finite table is a random bijection.
    """
    while True:
        m = int(rng.integers(1, max_modulus + 1))
        sigma = [int(s) for s in rng.permutation(m)]
        ks = [int(k) for k in rng.integers(-1, 2, size=m)]
        ks[-1] -= sum(ks)
        if abs(ks[-1]) > 2:
            continue
        offs = [sigma[r] - r + m * ks[r] for r in range(m)]
        lo = m + max(0, -min(offs))
        if lo > max_table:
            continue
        T = int(rng.integers(lo, max_table + 1))
        window = T + max(0, max(offs)) + m
        image = set()
        for x in range(T, window + m + max(0, -min(offs))):
            y = x + offs[x % m]
            if y < window:
                image.add(y)
        rest = [y for y in range(window) if y not in image]
        if len(rest) != T:
            continue
        perm = [rest[i] for i in rng.permutation(T)]
        return TailPermutation.build(m, offs, T, lambda x: perm[x])
