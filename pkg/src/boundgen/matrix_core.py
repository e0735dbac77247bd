"""Dense complex matrix primitives with a uniform tolerance policy.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every equality
claim made elsewhere in the package is a residual claim measured here.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NoConvergence, NotHermitian, NotUnitary

# eigenvector components below this magnitude are skipped when fixing the phase
PHASE_CUTOFF = 1e-8


@dataclass(frozen=True)
class TolerancePolicy:
    tol_unitary: float = 1e-10
    tol_projection: float = 1e-10
    tol_meet: float = 1e-8
    tol_residual: float = 1e-8

    def __post_init__(self):
        for name in ("tol_unitary", "tol_projection", "tol_meet", "tol_residual"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1e-2:
                raise ValueError(f"{name}={value} outside [0, 1e-2]")

    def replace(self, **changes):
        fields = dict(
            tol_unitary=self.tol_unitary,
            tol_projection=self.tol_projection,
            tol_meet=self.tol_meet,
            tol_residual=self.tol_residual,
        )
        fields.update(changes)
        return TolerancePolicy(**fields)


DEFAULT_TOL = TolerancePolicy()


def as_matrix(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInput(f"expected a nonempty square matrix, got shape {a.shape}")
    return a


def adjoint(a):
    return a.conj().T


def operator_norm(a):
    """Largest singular value of ``a``."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def unitarity_residual(u):
    u = as_matrix(u)
    return operator_norm(u @ adjoint(u) - np.eye(u.shape[0]))


def check_unitary(u, tol=DEFAULT_TOL):
    u = as_matrix(u)
    res = unitarity_residual(u)
    if res > tol.tol_unitary:
        raise NotUnitary(f"||u u* - 1|| = {res:.3e} > {tol.tol_unitary:.1e}")
    return u


def fix_phases(vectors):
    """Rotate each column so its first non-negligible entry is real positive."""
    v = np.array(vectors, dtype=np.complex128, copy=True)
    for j in range(v.shape[1]):
        col = v[:, j]
        big = np.nonzero(np.abs(col) > PHASE_CUTOFF)[0]
        if big.size:
            z = col[big[0]]
            v[:, j] = col * (abs(z) / z)
    return v


def _jacobi_rotation(app, aqq, apq):
    """Angle and phase of the rotation annihilating the (p, q) entry."""
    mag = abs(apq)
    phase = apq / mag
    theta = 0.5 * np.arctan2(2.0 * mag, (app - aqq).real)
    return np.cos(theta), np.sin(theta), phase


def jacobi_eigh(a, tol=1e-14, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Sweeps the strictly upper triangle in row-major order, so the output is
    a deterministic function of the input. Returns unsorted eigenvalues and
    the accumulated rotation matrix.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                c, s, ph = _jacobi_rotation(a[p, p], a[q, q], apq)
                # J = diag(1, conj(ph)) @ [[c, -s], [s, c]] acting on (p, q)
                jqp = s * np.conj(ph)
                jqq = c * np.conj(ph)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp + jqp * colq
                a[:, q] = -s * colp + jqq * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp + np.conj(jqp) * rowq
                a[q, :] = -s * rowp + np.conj(jqq) * rowq
                a[q, p] = 0.0
                a[p, q] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + jqp * vq
                v[:, q] = -s * vp + jqq * vq
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def hermitian_eigendecompose(a, tol=None, method="lapack"):
    """Eigenvalues ascending and a unitary eigenvector matrix for Hermitian ``a``.

    ``method="jacobi"`` runs the in-house cyclic Jacobi solver; the default
    ``"lapack"`` uses ``numpy.linalg.eigh``. Either way the eigenvectors are
    put into the fixed phase convention.
    """
    a = as_matrix(a)
    if tol is None:
        tol = 1e-10 * max(1.0, operator_norm(a))
    skew = operator_norm(a - adjoint(a))
    if skew > tol:
        raise NotHermitian(f"||a - a*|| = {skew:.3e} > {tol:.1e}")
    h = 0.5 * (a + adjoint(a))
    if method == "jacobi":
        w, v = jacobi_eigh(h)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    elif method == "lapack":
        w, v = np.linalg.eigh(h)
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.asarray(w, dtype=float), fix_phases(v)


def random_unitary(dim, seed):
    """Haar-distributed unitary from a seeded complex Gaussian matrix."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q


def random_hermitian(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + adjoint(z))


def polar_unitary(a):
    """Closest unitary to ``a`` (unitary polar factor)."""
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def matrix_to_json(a):
    a = as_matrix(a)
    return {
        "dim": int(a.shape[0]),
        "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj):
    try:
        d = int(obj["dim"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad matrix JSON: {exc}") from exc
    if d < 1 or len(data) != d * d:
        raise InvalidInput(f"matrix JSON: expected {d * d} entries, got {len(data)}")
    try:
        flat = np.array([complex(float(re), float(im)) for re, im in data])
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad matrix entry: {exc}") from exc
    return flat.reshape(d, d)
