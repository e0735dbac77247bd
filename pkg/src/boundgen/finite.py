"""Bounded factorizations of unitary matrices over support-restricted subgroups.

Three constructions live here:

* the five-factor decomposition of an element of G(p1+p2+p3) into factors
  alternately supported in p2+p3 and p1+p2;
* a trace-zero symmetry factorization of a corner unitary, with conjugators
  to one fixed base symmetry;
* the (2/3)^n trace ladder, which rewrites any unitary as a word over
  G(q0) and finitely many generators.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DivisibilityError,
    NotAPartition,
    NotInCorner,
    NumericalDegeneracy,
    OddCornerRank,
    TraceMismatch,
)
from .matrix_core import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    check_unitary,
    hermitian_eigendecompose,
    operator_norm,
    polar_unitary,
    random_unitary,
)
from .projections import CornerContext, Projection, conjugator, meet, support_residual
from .words import Certificate, Letter, evaluate, MatrixModel

# reference constants, kept beside the measured ones
PAPER_FIVE = 5
PAPER_LADDER_STEP = 8
PAPER_SYMMETRY_COUNT = 16


@dataclass(frozen=True)
class TriplePartition:
    p1: Projection
    p2: Projection
    p3: Projection

    def __post_init__(self):
        parts = (self.p1, self.p2, self.p3)
        if any(p.rank == 0 for p in parts):
            raise NotAPartition("every part must be a nonzero projection")
        for i in range(3):
            for j in range(i + 1, 3):
                overlap = operator_norm(adjoint(parts[i].basis) @ parts[j].basis)
                if overlap > DEFAULT_TOL.tol_residual:
                    raise NotAPartition(f"parts {i + 1} and {j + 1} overlap: {overlap:.2e}")
        if self.p1.rank != self.p2.rank:
            raise TraceMismatch(f"rank p1 = {self.p1.rank} but rank p2 = {self.p2.rank}")

    @property
    def dim(self):
        return self.p1.dim

    @property
    def corner(self):
        return Projection.from_basis(np.hstack([self.p1.basis, self.p2.basis, self.p3.basis]))

    @property
    def a_support(self):
        return Projection.from_basis(np.hstack([self.p1.basis, self.p2.basis]))

    @property
    def b_support(self):
        return Projection.from_basis(np.hstack([self.p2.basis, self.p3.basis]))

    @classmethod
    def from_basis(cls, basis, k, r3):
        """p1, p2 of rank k and p3 of rank r3 from consecutive columns."""
        b = np.asarray(basis, dtype=np.complex128)
        return cls(
            Projection.from_basis(b[:, :k]),
            Projection.from_basis(b[:, k:2 * k]),
            Projection.from_basis(b[:, 2 * k:2 * k + r3]),
        )

    @classmethod
    def coordinate(cls, dim, k, r3):
        return cls.from_basis(np.eye(dim), k, r3)


def random_partition(dim, rng):
    """Random admissible partition with a Haar-random frame."""
    if dim < 3:
        raise ValueError("need dim >= 3 for three nonzero parts")
    k = int(rng.integers(1, (dim - 1) // 2 + 1))
    r3 = int(rng.integers(1, dim - 2 * k + 1))
    frame = random_unitary(dim, int(rng.integers(2**63)))
    return TriplePartition.from_basis(frame, k, r3)


def random_in_corner(p, rng):
    """Haar-random element of G(p)."""
    small = random_unitary(p.rank, int(rng.integers(2**63)))
    return p.basis @ small @ adjoint(p.basis) + (np.eye(p.dim) - p.matrix)


def _clean_in_corner(u, p, tol):
    """Compress u to the corner and snap it back to a unitary there."""
    u = check_unitary(as_matrix(u), tol)
    if support_residual(u, p) > tol.tol_residual:
        raise NotInCorner(f"support residual {support_residual(u, p):.2e} exceeds {tol.tol_residual:.1e}")
    block = polar_unitary(adjoint(p.basis) @ u @ p.basis)
    return p.basis @ block @ adjoint(p.basis) + (np.eye(p.dim) - p.matrix)


def _difference(big, small):
    """The projection big - small for small <= big."""
    w, v = hermitian_eigendecompose(big.matrix - small.matrix)
    return Projection.from_basis(v[:, w > 0.5])


def _block(w, p):
    """p w p + (1 - p), with the block snapped to the nearest unitary."""
    blk = polar_unitary(adjoint(p.basis) @ w @ p.basis)
    return p.basis @ blk @ adjoint(p.basis) + (np.eye(p.dim) - p.matrix)


def five_factor_decompose(u, t, tol=DEFAULT_TOL):
    """Write u in G(p1+p2+p3) as f1 f2 f3 f4 f5 with supports e, a, e, a, e.

    Here a = p1+p2 and e = p2+p3.
    """
    p = t.corner
    u = _clean_in_corner(u, p, tol)
    target = u
    e = t.b_support
    a = t.a_support
    ctx_e, ctx_a = CornerContext(e), CornerContext(a)

    q1 = t.p1.conjugated(u)
    q2 = t.p2.conjugated(u)

    r = _difference(e, meet(e, q1.complement(), tol))
    if r.rank > t.p2.rank:
        raise NumericalDegeneracy(
            f"rank(e - e^q1') = {r.rank} exceeds rank p2 = {t.p2.rank}; meet tolerance too tight"
        )
    u1 = conjugator(r, t.p2.leading(r.rank), ctx_e, tol)
    u2 = conjugator(q1.conjugated(u1), t.p1, ctx_a, tol)
    u21 = u2 @ u1
    u3 = conjugator(q2.conjugated(u21), t.p2, ctx_e, tol)
    v = u3 @ u21

    block_res = max(
        operator_norm(v @ q.matrix @ adjoint(v) - pi.matrix)
        for q, pi in ((q1, t.p1), (q2, t.p2), (t.p3.conjugated(u), t.p3))
    )
    if block_res > tol.tol_residual:
        raise NumericalDegeneracy(f"v q_i v* misses p_i by {block_res:.2e}")

    w = v @ u
    v1, v2, v3 = (_block(w, pi) for pi in (t.p1, t.p2, t.p3))
    factors = [adjoint(u1), adjoint(u2), adjoint(u3), v1 @ v2, v3]
    tags = ["B", "A", "B", "A", "B"]
    letters = [
        Letter(tag, f, e if tag == "B" else a)
        for tag, f in zip(tags, factors)
    ]
    product = evaluate(letters, MatrixModel(t.dim))
    return Certificate(
        kind="five_factor",
        target=target,
        letters=letters,
        claimed_bound=5,
        paper_bound=PAPER_FIVE,
        residual=operator_norm(product - target),
        meta={"block_residual": block_res, "compressed_rank": r.rank},
    )


# condition (B) surrogate -------------------------------------------------


def _is_trace_zero_symmetry(x, tol):
    n = x.shape[0]
    return (
        operator_norm(x - adjoint(x)) <= tol.tol_residual
        and operator_norm(x @ x - np.eye(n)) <= tol.tol_residual
        and abs(np.trace(x)) <= 0.5
    )


def _reflection_pair(zj, zk, alpha):
    """Unit x, y in span(zj, zk) with (1-2xx*)(1-2yy*) = diag(e^{i alpha}, e^{-i alpha})."""
    x = (zj + zk) / np.sqrt(2.0)
    y = (zj + np.exp(1j * alpha) * zk) / np.sqrt(2.0)
    return x, y


def symmetry_factorize(u, ctx, tol=DEFAULT_TOL):
    """Trace-zero symmetries s_1..s_k in G(c), all conjugate to one base, with
    u = s_1 ... s_k (1 + (phase - 1) c).
    """
    c = ctx.corner
    if c.rank % 2:
        raise OddCornerRank(f"corner rank {c.rank} is odd")
    u = check_unitary(as_matrix(u), tol)
    if support_residual(u, c) > tol.tol_residual:
        raise NotInCorner(f"support residual {support_residual(u, c):.2e}")
    d, m2 = c.dim, c.rank
    m = m2 // 2
    bound = 2 * (2 * m - 1)
    B = c.basis
    block = polar_unitary(adjoint(B) @ u @ B)
    off = np.eye(d) - c.matrix

    base_q = Projection.from_basis(B[:, :m])
    base = np.eye(d) - 2.0 * base_q.matrix

    def lift(small):
        return B @ small @ adjoint(B) + off

    def symmetry_letter(q):
        s = np.eye(d) - 2.0 * q.matrix
        w = conjugator(base_q, q, ctx, tol)
        return Letter("base_conjugate", s, c, conjugator=w)

    if _is_trace_zero_symmetry(block, tol):
        w_, v_ = hermitian_eigendecompose(0.5 * (block + adjoint(block)))
        q = Projection.from_basis(B @ v_[:, w_ < 0])
        letters, phase = [symmetry_letter(q)], 1.0 + 0j
    else:
        det = np.linalg.det(block)
        phase = np.exp(1j * np.angle(det) / m2)
        unimod = block / phase
        letters = []
        if operator_norm(unimod - np.eye(m2)) > tol.tol_residual:
            T, Z = scipy.linalg.schur(unimod, output="complex")
            theta = np.angle(np.diag(T))
            alpha = np.cumsum(theta)[:-1]
            for j, a in enumerate(alpha):
                if abs(np.exp(1j * a) - 1.0) < 1e-12:
                    continue
                x, y = _reflection_pair(Z[:, j], Z[:, j + 1], a)
                pad = [k for k in range(m2) if k not in (j, j + 1)][: m - 1]
                P = Z[:, pad]
                for v in (x, y):
                    q = Projection.from_basis(B @ np.column_stack([v, P]))
                    letters.append(symmetry_letter(q))

    phase_op = np.eye(d) + (phase - 1.0) * c.matrix
    product = evaluate(letters, MatrixModel(d))
    residual = operator_norm(product @ phase_op - u)
    return Certificate(
        kind="symmetry",
        target=u,
        letters=letters,
        claimed_bound=bound,
        paper_bound=PAPER_SYMMETRY_COUNT,
        residual=residual,
        phase=complex(phase),
        corner=c,
        base=base,
        meta={"surrogate_constant": bound},
    )


# trace ladder --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ladder:
    dim: int
    n: int
    q: list
    levels: list
    generators: list = field(repr=False)

    @property
    def q0(self):
        return self.q[0]


def ladder_ranks(dim, n):
    if n < 1:
        raise ValueError("n must be >= 1")
    if dim % 3**n:
        raise DivisibilityError(
            f"dim * (2/3)^{n} = {dim} * {2**n}/{3**n} is not an integer: need dim = 0 mod {3**n}, "
            f"but dim = {dim % 3**n} mod {3**n}"
        )
    return [dim * 2 ** (n - i) // 3 ** (n - i) for i in range(n + 1)]


def ladder_build(dim, n, seed=None, tol=DEFAULT_TOL):
    """Nested q_0 < ... < q_n = 1 with rank q_i = dim (2/3)^(n-i)."""
    ranks = ladder_ranks(dim, n)
    frame = np.eye(dim, dtype=np.complex128) if seed is None else random_unitary(dim, seed)
    q = [Projection.from_basis(frame[:, :r]) for r in ranks]
    levels, gens = [], []
    for i in range(n):
        half = ranks[i] // 2
        t = TriplePartition.from_basis(frame, half, half)
        levels.append(t)
        gens.append(conjugator(t.a_support, t.b_support, CornerContext(q[i + 1]), tol))
    return Ladder(dim, n, q, levels, gens)


def ladder_length(n):
    """Letters emitted by ladder_express: L(j) = 5 L(j-1) + 6, L(0) = 1."""
    return (5 ** (n + 1) - 3) // 2


def ladder_express(u, ladder, tol=DEFAULT_TOL):
    """Word over G(q0) and the generators equal to u."""
    u = check_unitary(as_matrix(u), tol)
    L = ladder
    calls = [0] * (L.n + 1)

    def express(g, level):
        calls[level] += 1
        if level == 0:
            return [Letter("element", g, L.q0)]
        t = L.levels[level - 1]
        cert = five_factor_decompose(g, t, tol)
        gen = L.generators[level - 1]
        out = []
        for letter in cert.letters:
            if letter.tag == "A":
                out += express(letter.payload, level - 1)
            else:
                inner = adjoint(gen) @ letter.payload @ gen
                out.append(Letter("generator", index=level - 1, power=1))
                out += express(inner, level - 1)
                out.append(Letter("generator", index=level - 1, power=-1))
        return out

    if support_residual(u, L.q0) <= tol.tol_residual:
        letters = [Letter("element", u, L.q0)]
    else:
        letters = express(u, L.n)
    product = evaluate(letters, MatrixModel(L.dim), L.generators)
    return Certificate(
        kind="ladder",
        target=u,
        letters=letters,
        claimed_bound=ladder_length(L.n),
        paper_bound=PAPER_LADDER_STEP ** L.n,
        residual=operator_norm(product - u),
        generators=list(L.generators),
        meta={
            "levels": L.n,
            "calls_per_level": calls,
            "ranks": [p.rank for p in L.q],
            "recurrence": "L(j) = 5 L(j-1) + 6, L(0) = 1",
        },
    )
