"""Assembling condition (B) and (C) certificates into one word over a chain.

A condition (C) word writes u with m letters from G(p) and a finite set F.
Each G(p) letter is in turn a product of n conjugates w g w^{-1} of one base
element g. Replacing every conjugator w by a chain element h that agrees
with w on the corner does not change w g w^{-1}, because g is supported
there. Each conjugate then costs three chain letters, for 3nm in total.
"""

import numpy as np

from .chains import agrees_on, find_witness
from .errors import IncompatibleProjections, MissingWitness
from .words import Certificate, Letter, model_for, evaluate, word_length


def symbolic_3nm(n, m):
    """Worst-case length when all m slots expand into n conjugates of three letters."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    return 3 * n * m


def symbolic_length(slot_kinds, n):
    """Length accounting for a (C)-word without group arithmetic.

    ``slot_kinds`` lists "element" or "generator" per letter; element slots
    cost 3n, generator slots cost 1.
    """
    return sum(3 * n if kind == "element" else 1 for kind in slot_kinds)


def _same(a, b):
    if a is None or b is None:
        return a is b
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and np.allclose(a, b, atol=1e-10)
    return a == b


def _corner_equal(a, b):
    if a is None or b is None:
        return a is b
    if hasattr(a, "matrix"):
        return a.dim == b.dim and np.allclose(a.matrix, b.matrix, atol=1e-8)
    return a == b


def collect_witnesses(b_certs, oracle, cap=10**4):
    """Fullness witnesses for every conjugator, keyed by (slot, letter)."""
    out = {}
    level = 1
    for k, cert in enumerate(b_certs):
        for i, letter in enumerate(cert.letters):
            if letter.tag != "base_conjugate":
                continue
            wit = find_witness(oracle, cert.corner, letter.conjugator, cap)
            out[(k, i)] = wit.h
            level = max(level, wit.level)
    return out, level


def assemble_3nm(c_cert, b_certs, witnesses, n=None, paper_bound=None):
    """Splice the (B)-expansions into the element slots of the (C)-word.

    ``b_certs[k]`` expands the k-th element letter of ``c_cert``;
    ``witnesses[(k, i)]`` replaces the conjugator of its i-th letter.
    """
    slots = [i for i, letter in enumerate(c_cert.letters) if letter.tag in ("element", "A", "B")]
    if len(b_certs) != len(slots):
        raise IncompatibleProjections(f"{len(slots)} element slots but {len(b_certs)} expansions")
    base = b_certs[0].base if b_certs else None
    corner = b_certs[0].corner if b_certs else None
    model = model_for(c_cert)
    for k, cert in enumerate(b_certs):
        if not _same(cert.base, base) or not _corner_equal(cert.corner, corner):
            raise IncompatibleProjections(f"expansion {k} uses a different base or corner")
        slot_elem = c_cert.letters[slots[k]].payload
        if model.distance(cert.target, slot_elem) > 1e-8:
            raise IncompatibleProjections(f"expansion {k} does not expand its slot")
    # the bound uses the claimed constants of the two conditions, not this instance
    n = max((c.claimed_bound for c in b_certs), default=1) if n is None else n
    n = max(n, 1)

    letters = []
    slot = 0
    for letter in c_cert.letters:
        if letter.tag not in ("element", "A", "B"):
            letters.append(letter)
            continue
        cert = b_certs[slot]
        for i, sub in enumerate(cert.letters):
            if sub.tag != "base_conjugate":
                letters.append(sub)
                continue
            h = witnesses.get((slot, i))
            if h is None:
                raise MissingWitness(f"no witness for conjugator ({slot}, {i})")
            if not agrees_on(sub.conjugator, h, corner):
                raise MissingWitness(f"witness ({slot}, {i}) disagrees with its conjugator on the corner")
            letters.append(Letter("conjugate", base, corner, conjugator=h, power=sub.power))
        if cert.phase is not None and model.name == "matrix":
            d = corner.dim
            op = np.eye(d) + (cert.phase - 1.0) * corner.matrix
            letters.append(Letter("phase", op, corner))
        slot += 1

    m = c_cert.claimed_bound
    out = Certificate(
        kind="assembled",
        target=c_cert.target,
        letters=letters,
        claimed_bound=symbolic_3nm(n, m),
        paper_bound=paper_bound,
        generators=list(c_cert.generators),
        base=base,
        corner=corner,
        meta={"n": n, "m": m, "slots": len(slots), "c_length": word_length(c_cert.letters)},
    )
    product = evaluate(letters, model, out.generators, base)
    out.residual = model.distance(product, c_cert.target) if model.name == "matrix" else None
    return out
