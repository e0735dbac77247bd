"""Words, certificates and the independent certificate verifier.

A certificate is a factorization record: a target group element, an ordered
list of letters whose left-to-right product should equal the target, and
the claims (support pattern, length bound) that the verifier re-checks with
its own arithmetic. Matrix certificates are checked up to a residual,
permutation certificates exactly.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, MixedPayloads
from .matrix_core import (
    DEFAULT_TOL,
    adjoint,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    unitarity_residual,
)
from .projections import Projection, support_residual
from .tailperm import ClassSet, TailPermutation

# letters that count as one element of the alphabet
PRIMITIVE_TAGS = ("A", "B", "element", "generator", "base_conjugate")
# letters expanding to (w, g^{+-1}, w^{-1})
CONJUGATE_TAG = "conjugate"
# projective correction, carries no length
PHASE_TAG = "phase"

TAGS = PRIMITIVE_TAGS + (CONJUGATE_TAG, PHASE_TAG)


@dataclass(frozen=True, eq=False)
class Letter:
    tag: str
    payload: object = None
    support: object = None
    index: int = None
    power: int = 1
    conjugator: object = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InvalidInput(f"unknown letter tag {self.tag!r}")

    @property
    def length(self):
        if self.tag == CONJUGATE_TAG:
            return 3
        if self.tag == PHASE_TAG:
            return 0
        return 1


@dataclass(eq=False)
class Certificate:
    kind: str
    target: object
    letters: list
    claimed_bound: int
    paper_bound: int
    measured_length: int = None
    residual: float = None
    phase: complex = None
    corner: object = None
    generators: list = field(default_factory=list)
    base: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.measured_length is None:
            self.measured_length = word_length(self.letters)

    @property
    def model(self):
        return "perm" if isinstance(self.target, TailPermutation) else "matrix"

    def to_json(self):
        return certificate_to_json(self)

    def dumps(self, **kw):
        return json.dumps(self.to_json(), **kw)


def word_length(letters):
    return sum(letter.length for letter in letters)


# group arithmetic for the two payload models ------------------------------


class MatrixModel:
    name = "matrix"

    def __init__(self, dim):
        self.dim = dim

    def identity(self):
        return np.eye(self.dim, dtype=np.complex128)

    def mul(self, a, b):
        return a @ b

    def inv(self, a):
        return adjoint(a)

    def power(self, a, k):
        return a if k == 1 else adjoint(a) if k == -1 else np.linalg.matrix_power(a, k)

    def distance(self, a, b):
        return operator_norm(a - b)

    def in_support(self, g, e, tol):
        return support_residual(g, e) <= tol.tol_residual

    def agrees_on(self, g, h, p, tol):
        """g p = h p: the fullness condition."""
        return operator_norm((g - h) @ p.basis) <= tol.tol_residual


class PermModel:
    name = "perm"

    def identity(self):
        return TailPermutation.identity()

    def mul(self, a, b):
        return a.compose(b)

    def inv(self, a):
        return a.inverse()

    def power(self, a, k):
        return a.power(k)

    def distance(self, a, b):
        return 0.0 if a == b else 1.0

    def in_support(self, g, s, tol=None):
        return g.support().issubset(s)

    def agrees_on(self, g, h, s, tol=None):
        """g and h agree on every point of S, i.e. h^{-1} g fixes S pointwise."""
        return h.inverse().compose(g).support().intersection(s).is_empty()


def model_for(cert_or_target):
    target = cert_or_target.target if isinstance(cert_or_target, Certificate) else cert_or_target
    if isinstance(target, TailPermutation):
        return PermModel()
    return MatrixModel(np.asarray(target).shape[0])


def _letter_value(letter, model, generators, base):
    if letter.tag == "generator":
        g = generators[letter.index]
        return model.power(g, letter.power)
    g = letter.payload
    if letter.tag == CONJUGATE_TAG:
        g = base if g is None else g
        w = letter.conjugator
        return model.mul(model.mul(w, model.power(g, letter.power)), model.inv(w))
    if letter.tag == "base_conjugate" and g is None:
        w = letter.conjugator
        return model.mul(model.mul(w, base), model.inv(w))
    return model.power(g, letter.power) if letter.power != 1 else g


def evaluate(letters, model, generators=(), base=None):
    """Left-to-right product of the letters; the empty word is the identity."""
    kinds = {type(x.payload) for x in letters if x.tag not in ("generator",) and x.payload is not None}
    if len({k is TailPermutation for k in kinds}) > 1:
        raise MixedPayloads("letters mix matrix and permutation payloads")
    acc = model.identity()
    for letter in letters:
        acc = model.mul(acc, _letter_value(letter, model, generators, base))
    return acc


def evaluate_certificate(cert):
    model = model_for(cert)
    return evaluate(cert.letters, model, cert.generators, cert.base), model


def _phase_operator(cert):
    if cert.phase is None:
        return None
    d = np.asarray(cert.target).shape[0]
    c = cert.corner.matrix if cert.corner is not None else np.eye(d)
    return np.eye(d) + (cert.phase - 1.0) * c


# verification --------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    ok: bool
    checks: list
    measured_length: int
    claimed_bound: int
    paper_bound: int
    residual: float = None

    def failed(self):
        return [c for c in self.checks if not c.ok]

    def to_json(self):
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
            "measured_length": self.measured_length,
            "claimed_bound": self.claimed_bound,
            "paper_bound": self.paper_bound,
        }


FIVE_FACTOR_PATTERNS = (("B", "A", "B", "A", "B"), ("A", "B", "A", "B", "A"))


def verify(cert, tol=DEFAULT_TOL):
    """Re-check a certificate from scratch; failures are reported, not raised."""
    checks = []
    try:
        model = model_for(cert)
        product = evaluate(cert.letters, model, cert.generators, cert.base)
    except Exception as exc:  # malformed letters are a verification failure
        checks.append(Check("evaluate", False, f"{type(exc).__name__}: {exc}"))
        return VerificationReport(False, checks, word_length(cert.letters),
                                  cert.claimed_bound, cert.paper_bound)

    length = word_length(cert.letters)
    residual = None
    if model.name == "matrix":
        target = np.asarray(cert.target)
        recon = product
        phase_op = _phase_operator(cert)
        if phase_op is not None:
            recon = product @ phase_op
        residual = operator_norm(recon - target)
        bound = tol.tol_residual * max(1, length)
        checks.append(Check("product", residual <= bound, f"residual {residual:.3e} (bound {bound:.1e})"))
    else:
        equal = product == cert.target
        checks.append(Check("product", equal, "exact canonical equality"))

    checks.append(Check(
        "measured_length",
        cert.measured_length == length,
        f"stated {cert.measured_length}, recomputed {length}",
    ))
    checks.append(Check(
        "length_bound",
        length <= cert.claimed_bound,
        f"length {length} vs claimed bound {cert.claimed_bound}",
    ))

    bad_support = []
    for i, letter in enumerate(cert.letters):
        if letter.support is None or letter.tag in ("generator", CONJUGATE_TAG):
            continue
        g = letter.payload
        if g is None:
            continue
        if not model.in_support(g, letter.support, tol):
            bad_support.append(i)
    checks.append(Check("supports", not bad_support,
                        f"letters outside claimed support: {bad_support}" if bad_support else "all claims hold"))

    gens_ok = all(
        letter.index is not None and 0 <= letter.index < len(cert.generators) and letter.power in (1, -1)
        for letter in cert.letters if letter.tag == "generator"
    )
    checks.append(Check("generators", gens_ok, f"{len(cert.generators)} generators"))

    if cert.kind in ("five_factor", "five_factor_perm"):
        tags = tuple(letter.tag for letter in cert.letters)
        checks.append(Check("pattern", tags in FIVE_FACTOR_PATTERNS, "-".join(tags)))

    if any(letter.tag == "base_conjugate" for letter in cert.letters):
        checks.extend(_check_base_conjugates(cert, model, tol))

    ok = all(c.ok for c in checks)
    return VerificationReport(ok, checks, length, cert.claimed_bound, cert.paper_bound, residual)


def _check_base_conjugates(cert, model, tol):
    checks = []
    base = cert.base
    if base is None:
        return [Check("base", False, "certificate has no base element")]
    bad_conj, bad_inv = [], []
    for i, letter in enumerate(cert.letters):
        if letter.tag != "base_conjugate":
            continue
        w = letter.conjugator
        s = letter.payload
        if w is None:
            bad_conj.append(i)
            continue
        conj = model.mul(model.mul(w, base), model.inv(w))
        if s is not None and model.distance(conj, s) > tol.tol_residual:
            bad_conj.append(i)
        s = conj if s is None else s
        if model.name == "matrix":
            d = s.shape[0]
            herm = operator_norm(s - adjoint(s))
            invol = operator_norm(s @ s - np.eye(d))
            if max(herm, invol) > 1e-9:
                bad_inv.append(i)
            if cert.corner is not None:
                tr = np.trace(cert.corner.matrix @ s @ cert.corner.matrix)
                if abs(tr) > 1e-6 or not model.in_support(w, cert.corner, tol):
                    bad_inv.append(i)
        else:
            if not s.is_involution():
                bad_inv.append(i)
            if cert.corner is not None and not model.in_support(w, cert.corner):
                bad_inv.append(i)
    checks.append(Check("conjugates_of_base", not bad_conj,
                        f"bad conjugators at {bad_conj}" if bad_conj else "all conjugate to base"))
    checks.append(Check("symmetry_factors", not bad_inv,
                        f"bad factors at {sorted(set(bad_inv))}" if bad_inv else "involutive, trace-zero, in corner"))
    return checks


# serialization --------------------------------------------------------------


def _elem_to_json(x):
    if isinstance(x, TailPermutation):
        return x.to_json()
    return matrix_to_json(x)


def _elem_from_json(obj, model):
    return TailPermutation.from_json(obj) if model == "perm" else matrix_from_json(obj)


def _support_to_json(s):
    if s is None:
        return None
    return s.to_json()


def _support_from_json(obj, model, tol):
    if obj is None:
        return None
    return ClassSet.from_json(obj) if model == "perm" else Projection.from_json(obj, tol)


def certificate_to_json(cert):
    letters = []
    for letter in cert.letters:
        item = {"tag": letter.tag}
        if letter.tag == "generator":
            item["payload"] = letter.index
        else:
            item["payload"] = None if letter.payload is None else _elem_to_json(letter.payload)
        item["support"] = _support_to_json(letter.support)
        if letter.power != 1:
            item["power"] = letter.power
        if letter.conjugator is not None:
            item["conjugator"] = _elem_to_json(letter.conjugator)
        letters.append(item)
    out = {
        "kind": cert.kind,
        "model": cert.model,
        "input": _elem_to_json(cert.target),
        "letters": letters,
        "claimed_bound": int(cert.claimed_bound),
        "paper_bound": None if cert.paper_bound is None else int(cert.paper_bound),
        "measured_length": int(cert.measured_length),
        "residual": None if cert.residual is None else float(cert.residual),
    }
    if cert.phase is not None:
        out["phase"] = [float(np.real(cert.phase)), float(np.imag(cert.phase))]
    if cert.corner is not None:
        out["corner"] = cert.corner.to_json()
    if cert.generators:
        out["generators"] = [_elem_to_json(g) for g in cert.generators]
    if cert.base is not None:
        out["base"] = _elem_to_json(cert.base)
    if cert.meta:
        out["meta"] = cert.meta
    return out


def certificate_from_json(obj, tol=DEFAULT_TOL):
    try:
        model = obj.get("model", "matrix")
        target = _elem_from_json(obj["input"], model)
        letters = []
        for item in obj["letters"]:
            tag = item["tag"]
            power = int(item.get("power", 1))
            support = _support_from_json(item.get("support"), model, tol)
            conj = item.get("conjugator")
            conj = None if conj is None else _elem_from_json(conj, model)
            if tag == "generator":
                letters.append(Letter(tag, None, support, int(item["payload"]), power, conj))
            else:
                payload = item.get("payload")
                payload = None if payload is None else _elem_from_json(payload, model)
                letters.append(Letter(tag, payload, support, None, power, conj))
        phase = obj.get("phase")
        phase = None if phase is None else complex(phase[0], phase[1])
        corner = obj.get("corner")
        corner = None if corner is None else _support_from_json(corner, model, tol)
        gens = [_elem_from_json(g, model) for g in obj.get("generators", [])]
        base = obj.get("base")
        base = None if base is None else _elem_from_json(base, model)
        return Certificate(
            kind=obj["kind"],
            target=target,
            letters=letters,
            claimed_bound=int(obj["claimed_bound"]),
            paper_bound=obj.get("paper_bound"),
            measured_length=int(obj["measured_length"]),
            residual=obj.get("residual"),
            phase=phase,
            corner=corner,
            generators=gens,
            base=base,
            meta=obj.get("meta", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad certificate JSON: {exc}") from exc


def loads(text, tol=DEFAULT_TOL):
    return certificate_from_json(json.loads(text), tol)


def unitary_ok(u, tol=DEFAULT_TOL):
    return unitarity_residual(u) <= tol.tol_unitary
