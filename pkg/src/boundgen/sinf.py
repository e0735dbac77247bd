"""The properly infinite case in the tail-permutation model.

Projections become subsets of the naturals (ClassSets), unitaries become
TailPermutations, symmetries become involutions. Tail permutations preserve
natural density, which plays the role of the trace: it is the one invariant
that every bijection built here has to respect.
"""

from fractions import Fraction

from .errors import (
    DegenerateOrientation,
    DensityMismatch,
    NotAPartition,
    NotInCorner,
    NotInfinite,
    NotReversible,
)
from .tailperm import ClassSet, TailPermutation, lcm, set_bijection, shift_permutation
from .words import Certificate, Letter, PermModel, evaluate

PAPER_INVOLUTIONS = 4
PAPER_STEP = 8


def support_in(a, s):
    """(True, None) when a moves only points of S, else (False, least moved point outside S)."""
    outside = a.support().difference(s)
    if outside.is_empty():
        return True, None
    return False, outside.min_element()


def mod3_partition():
    return tuple(ClassSet.residue_classes(3, [r]) for r in range(3))


def check_partition(parts, universe=None):
    u = ClassSet.everything() if universe is None else universe
    union = ClassSet.empty()
    for i, p in enumerate(parts):
        if not union.intersection(p).is_empty():
            raise NotAPartition(f"part {i + 1} meets an earlier part")
        union = union.union(p)
    if union != u:
        raise NotAPartition("parts do not cover the universe")
    for i, p in enumerate(parts):
        if p.is_finite():
            raise NotInfinite(f"part {i + 1} is finite")


# five factors --------------------------------------------------------------


def _subset_like(r, p2):
    """A subset of P2 with the same size as r (same count, or same density)."""
    if r.is_finite():
        return ClassSet.finite(p2.first_elements(len(r.finite_elements())))
    M = lcm(r.m, p2.m)
    k = len(r.residues_mod(M))
    classes = sorted(p2.residues_mod(M))[:k]
    return ClassSet.residue_classes(M, classes).intersection(p2)


def _five_oriented(u, p1, p2, p3):
    """One orientation of the construction; None when the compression step is impossible."""
    e = p2.union(p3)
    a = p1.union(p2)
    q1 = u.image(p1)
    r = e.intersection(q1)
    if r.density > p2.density:
        return None
    if not r.is_finite() and r.density == e.density:
        return None
    u1 = set_bijection(r, _subset_like(r, p2), e)
    u2 = set_bijection(u1.image(q1), p1, a)
    u21 = u2.compose(u1)
    u3 = set_bijection(u21.image(u.image(p2)), p2, e)
    v = u3.compose(u21)
    w = v.compose(u)
    factors = [u1.inverse(), u2.inverse(), u3.inverse(), w.restrict(a), w.restrict(p3)]
    return factors, e, a


def five_factor_decompose_perm(u, p1, p2, p3):
    """u = f1 f2 f3 f4 f5 with factors alternately supported in P2+P3 and P1+P2."""
    check_partition((p1, p2, p3))
    got = _five_oriented(u, p1, p2, p3)
    orientation = "standard"
    if got is None:
        # mirrored roles: P3 plays P1; the pattern becomes A,B,A,B,A
        got = _five_oriented(u, p3, p2, p1)
        orientation = "mirrored"
    if got is None:
        raise DegenerateOrientation(
            "neither orientation compresses u(P1) into P2: densities "
            f"{p1.density}, {p2.density}, {p3.density}"
        )
    factors, first, second = got
    tag_first, tag_second = ("B", "A") if orientation == "standard" else ("A", "B")
    letters = []
    for i, f in enumerate(factors):
        if i % 2 == 0:
            letters.append(Letter(tag_first, f, first))
        else:
            letters.append(Letter(tag_second, f, second))
    product = evaluate(letters, PermModel())
    if product != u:
        raise AssertionError("five-factor product differs from the input")
    return Certificate(
        kind="five_factor_perm",
        target=u,
        letters=letters,
        claimed_bound=5,
        paper_bound=5,
        meta={"orientation": orientation},
    )


# orbits and involutions ----------------------------------------------------


def _sigma_cycles(a):
    m, c = a.m, a.offsets
    sig = a.sigma
    seen, cycles = set(), []
    for r0 in range(m):
        if r0 in seen:
            continue
        cyc, r = [], r0
        while r not in seen:
            seen.add(r)
            cyc.append(r)
            r = sig[r]
        drift = sum(c[r] for r in cyc)
        prefix = [0]
        for r in cyc:
            prefix.append(prefix[-1] + c[r])
        cycles.append({"residues": cyc, "k": len(cyc), "C": drift, "prefix": prefix})
    return cycles


class _OrbitWalker:
    """Orbits of a tail permutation meeting [0, T1), found by walking."""

    def __init__(self, a):
        self.a = a
        self.ainv = a.inverse()
        self.cycles = _sigma_cycles(a)
        self.cycle_of = {}
        for idx, cyc in enumerate(self.cycles):
            for pos, r in enumerate(cyc["residues"]):
                self.cycle_of[r] = (idx, pos)
        spread = a.m * max(1, a.max_shift)
        self.T1 = max(a.T, self.ainv.T) + spread + a.m
        self.spread = spread
        self.finite = []
        self.lines = []
        self.where = {}
        self._walk_core()

    def _escaped(self, y, forward, floor):
        """True when the orbit of y never returns below ``floor`` in the given direction."""
        floor = max(floor, self.a.T, self.ainv.T)
        if y - self.spread < floor:
            return False
        idx, _ = self.cycle_of[y % self.a.m]
        C = self.cycles[idx]["C"]
        return C > 0 if forward else C < 0

    def _walk_core(self):
        a, ainv = self.a, self.ainv
        for x in range(self.T1):
            if x in self.where:
                continue
            pts, y = [x], a(x)
            while y != x and not self._escaped(y, True, self.T1):
                pts.append(y)
                y = a(y)
            if y == x:
                lo = pts.index(min(pts))
                cyc = pts[lo:] + pts[:lo]
                k = len(self.finite)
                self.finite.append(cyc)
                for j, z in enumerate(cyc):
                    self.where[z] = ("f", k, j)
                continue
            fwd = pts + [y]
            back, y = [], ainv(x)
            while not self._escaped(y, False, self.T1):
                back.append(y)
                y = ainv(y)
            back.append(y)
            full = back[::-1] + fwd
            anchor = full.index(min(full))
            line = {"pos": full[anchor:], "neg": full[:anchor + 1][::-1]}
            k = len(self.lines)
            self.lines.append(line)
            for j, z in enumerate(line["pos"]):
                self.where[z] = ("z", k, j)
            for j, z in enumerate(line["neg"]):
                self.where[z] = ("z", k, -j)
        for line in self.lines:
            line["speed_f"] = self._speed(line["pos"][-1])
            line["speed_b"] = self._speed(line["neg"][-1])

    def _speed(self, y):
        cyc = self.cycles[self.cycle_of[y % self.a.m][0]]
        return Fraction(abs(cyc["C"]), cyc["k"])

    def point(self, k, j):
        """j-th point of line k, extending the walk on demand."""
        line = self.lines[k]
        if j >= 0:
            pts, step = line["pos"], self.a
        else:
            pts, step, j = line["neg"], self.ainv, -j
        while len(pts) <= j:
            z = step(pts[-1])
            self.where[z] = ("z", k, len(pts) if pts is line["pos"] else -len(pts))
            pts.append(z)
        return pts[j]

    def locate(self, z):
        """(kind, orbit, index) for z; "t" marks a tail-only finite cycle."""
        if z in self.where:
            return self.where[z]
        idx, pos = self.cycle_of[z % self.a.m]
        cyc = self.cycles[idx]
        if cyc["C"] == 0:
            return ("t", idx, pos)
        # a point of some line beyond the walked range: extend all lines past z
        for k, line in enumerate(self.lines):
            for key in ("pos", "neg"):
                pts = line[key]
                sign = 1 if key == "pos" else -1
                while not (pts[-1] > z and self._escaped(pts[-1], key == "pos", z + 1)):
                    self.point(k, sign * len(pts))
            if z in self.where:
                return self.where[z]
        raise AssertionError(f"point {z} not on any orbit")

    def tail_point(self, z, idx, pos, j):
        """Point at index j of the tail cycle through z (anchored at the cycle's first residue)."""
        cyc = self.cycles[idx]
        k, prefix = cyc["k"], cyc["prefix"]
        x0 = z - prefix[pos]
        return x0 + prefix[j % k]

    def modulus(self):
        K = lcm(*(cyc["k"] for cyc in self.cycles))
        M = self.a.m
        for line in self.lines:
            for s in (line["speed_f"], line["speed_b"]):
                M = lcm(M, int(s * K))
        return M


def _pair_lines(walker):
    """Partner of every line: itself when its two speeds agree, else a line with swapped speeds."""
    partner = {}
    lines = walker.lines
    for k, line in enumerate(lines):
        if k in partner:
            continue
        if line["speed_f"] == line["speed_b"]:
            partner[k] = k
            continue
        for k2 in range(k + 1, len(lines)):
            other = lines[k2]
            if k2 not in partner and other["speed_f"] == line["speed_b"] and other["speed_b"] == line["speed_f"]:
                partner[k], partner[k2] = k2, k
                break
        else:
            raise NotReversible(
                f"an infinite orbit runs forward at speed {line['speed_f']} and backward at "
                f"{line['speed_b']}, and no orbit has the swapped speeds"
            )
    return partner


def _reflection(walker, partner):
    def i2(z):
        kind, k, j = walker.locate(z)
        if kind == "f":
            cyc = walker.finite[k]
            return cyc[(-j) % len(cyc)]
        if kind == "t":
            return walker.tail_point(z, k, j, -j)
        return walker.point(partner[k], -j)

    return i2


def _from_map(func, M, T0, check):
    """Tail permutation equal to func, found by growing the threshold until it fits."""
    T = -(-T0 // M) * M
    for _ in range(12):
        try:
            g = TailPermutation.from_pointwise(func, M, T)
        except Exception:
            g = None
        if g is not None and all(g(x) == func(x) for x in range(T + check * M)):
            return g
        T *= 2
    raise AssertionError("pointwise map is not eventually periodic")


def involution_factorize(a):
    """Involutions (i1, i2) with a = i1 o i2 and supports inside supp a."""
    if a.is_identity():
        ident = TailPermutation.identity()
        return ident, ident
    walker = _OrbitWalker(a)
    partner = _pair_lines(walker)
    M = walker.modulus()
    i2 = _from_map(_reflection(walker, partner), M, walker.T1 + 2 * M, 8)
    i1 = a.compose(i2)
    if not (i1.is_involution() and i2.is_involution()):
        raise AssertionError("orbit reflections are not involutions")
    return i1, i2


# padding and conjugacy to the base involution --------------------------------


def _involution_parts(i, s):
    """Representatives (x < i(x)), partners and fixed points of i within S."""
    M = lcm(i.m, s.m)
    bound = max(i.T, s.bound, i.inverse().T) + M
    rep_res = [R for R in range(M) if R % s.m in s.residues and i.offsets[R % i.m] > 0]
    rep = ClassSet.from_membership(M, rep_res, bound, lambda x: s.contains(x) and i(x) > x)
    fix_res = [R for R in range(M) if R % s.m in s.residues and i.offsets[R % i.m] == 0]
    fix = ClassSet.from_membership(M, fix_res, bound, lambda x: s.contains(x) and i(x) == x)
    return rep, fix, M, bound


def pad_involution(i, s=None):
    """Involution j commuting with i such that j and i j each move half of S and fix half."""
    s = ClassSet.everything() if s is None else s
    if s.is_finite():
        raise NotInfinite("universe must be infinite")
    ok, witness = support_in(i, s)
    if not ok:
        raise NotInCorner(f"involution moves {witness}, outside the universe")
    rep, fix, M, bound = _involution_parts(i, s)

    def in_x(x):
        return rep.contains(x) and x % (2 * M) < M

    def in_u(x):
        return fix.contains(x) and fix.contains(x + M) and x % (4 * M) < M

    def j(x):
        y = i(x)
        if in_x(x) or (y < x and in_x(y)):
            return y
        if in_u(x):
            return x + M
        if x >= M and in_u(x - M):
            return x - M
        return x

    return _from_map(j, 4 * M, bound + 8 * M, 4)


def base_involution(s=None):
    """The fixed base involution of the universe S: the padding of the identity."""
    return pad_involution(TailPermutation.identity(), s)


def involution_conjugator(i, j, s=None):
    """w supported in S with w i w^{-1} = j, for involutions of matching densities."""
    s = ClassSet.everything() if s is None else s
    rep_i, fix_i, Mi, bi = _involution_parts(i, s)
    rep_j, fix_j, Mj, bj = _involution_parts(j, s)
    if rep_i.is_finite() != rep_j.is_finite() or rep_i.density != rep_j.density:
        raise DensityMismatch("2-cycle sets of different size")
    if fix_i.is_finite() != fix_j.is_finite() or fix_i.density != fix_j.density:
        raise DensityMismatch("fixed-point sets of different size")
    b1 = set_bijection(rep_i, rep_j, s)
    b2 = set_bijection(fix_i, fix_j, s)

    def w(x):
        if not s.contains(x):
            return x
        if rep_i.contains(x):
            return b1(x)
        if fix_i.contains(x):
            return b2(x)
        return j(b1(i(x)))

    M = lcm(Mi, Mj, b1.m, b2.m)
    return _from_map(w, M, max(bi, bj, b1.T, b2.T) + 2 * M, 4)


def involution_certificate(a, s=None):
    """a as a product of four conjugates of the base involution of S."""
    s = ClassSet.everything() if s is None else s
    ok, witness = support_in(a, s)
    if not ok:
        raise NotInCorner(f"a moves {witness}, outside the universe")
    base = base_involution(s)
    i1, i2 = involution_factorize(a)
    j1, j2 = pad_involution(i1, s), pad_involution(i2, s)
    factors = [i1.compose(j1), j1, j2, j2.compose(i2)]
    letters = [
        Letter("base_conjugate", f, s, conjugator=involution_conjugator(base, f, s))
        for f in factors
    ]
    return Certificate(
        kind="involution",
        target=a,
        letters=letters,
        claimed_bound=PAPER_INVOLUTIONS,
        paper_bound=PAPER_INVOLUTIONS,
        corner=s,
        base=base,
        meta={"i1": i1.to_json(), "i2": i2.to_json()},
    )


# condition (C) -------------------------------------------------------------


def split_for_generator(p):
    """P = P1 + P2 with P1 the size of the complement, so some w carries P1+P2 onto P2+P3."""
    if p.is_finite() or p.complement().is_finite():
        raise NotInfinite("P and its complement must be infinite")
    comp = p.complement()
    M = lcm(p.m, comp.m)
    k = len(comp.residues_mod(M))
    mine = sorted(p.residues_mod(M))
    if k >= len(mine):
        raise DensityMismatch(
            f"P has density {p.density}; a generator carrying P1+P2 onto P2+P3 "
            "needs a P2 of positive density, i.e. density above 1/2"
        )
    p1 = ClassSet.residue_classes(M, mine[:k]).intersection(p)
    return p1, p.difference(p1), comp


def cond_c_express_perm(u, p=None):
    """u as a word over G(P) and one generator w with w(P1+P2) = P2+P3."""
    if p is None:
        p1, p2, p3 = mod3_partition()
        p = p1.union(p2)
        w = shift_permutation(3, (1, 1, -2))
    else:
        p1, p2, p3 = split_for_generator(p)
        w = set_bijection(p, p2.union(p3))
    winv = w.inverse()
    if support_in(u, p)[0]:
        letters = [Letter("element", u, p)]
        orientation = None
    else:
        five = five_factor_decompose_perm(u, p1, p2, p3)
        orientation = five.meta["orientation"]
        letters = []
        for letter in five.letters:
            if letter.tag == "A":
                letters.append(Letter("element", letter.payload, p))
            else:
                inner = winv.compose(letter.payload).compose(w)
                letters += [
                    Letter("generator", index=0, power=1),
                    Letter("element", inner, p),
                    Letter("generator", index=0, power=-1),
                ]
    return Certificate(
        kind="cond_c_perm",
        target=u,
        letters=letters,
        claimed_bound=11,
        paper_bound=PAPER_STEP,
        generators=[w],
        meta={"orientation": orientation},
    )


# condition (A) surrogate ----------------------------------------------------


def blockwise_assemble(blocks):
    """The bijection acting as g_k on block B_k, for disjoint blocks covering the naturals."""
    sets = [b for b, _ in blocks]
    union = ClassSet.empty()
    for k, b in enumerate(sets):
        if b.is_empty():
            raise NotAPartition(f"block {k} is empty")
        if not union.intersection(b).is_empty():
            raise NotAPartition(f"block {k} meets an earlier block")
        union = union.union(b)
    if union != ClassSet.everything():
        raise NotAPartition("blocks do not cover the naturals")
    g = TailPermutation.identity()
    for k, (b, h) in enumerate(blocks):
        if h.image(b) != b:
            raise NotInCorner(f"permutation {k} does not preserve its block")
        g = g.compose(h.restrict(b))
    return g
