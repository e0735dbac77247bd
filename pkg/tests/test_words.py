import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundgen.errors import InvalidInput, MixedPayloads
from boundgen.finite import five_factor_decompose, random_in_corner, random_partition
from boundgen.matrix_core import random_unitary
from boundgen.sinf import five_factor_decompose_perm, mod3_partition
from boundgen.tailperm import TailPermutation, random_tail_permutation
from boundgen.words import (
    Certificate,
    Letter,
    MatrixModel,
    PermModel,
    certificate_from_json,
    evaluate,
    loads,
    verify,
    word_length,
)

seeds = st.integers(0, 2**32)


def matrix_cert(seed, d=4):
    rng = np.random.default_rng(seed)
    t = random_partition(d, rng)
    return five_factor_decompose(random_in_corner(t.corner, rng), t)


def perm_cert(seed):
    u = random_tail_permutation(np.random.default_rng(seed))
    return five_factor_decompose_perm(u, *mod3_partition())


def test_empty_word_is_identity():
    assert np.array_equal(evaluate([], MatrixModel(3)), np.eye(3))
    assert evaluate([], PermModel()).is_identity()


def test_mixed_payloads():
    letters = [Letter("element", np.eye(2)), Letter("element", TailPermutation.identity())]
    with pytest.raises(MixedPayloads):
        evaluate(letters, MatrixModel(2))


def test_letter_lengths():
    assert Letter("conjugate", np.eye(2), conjugator=np.eye(2)).length == 3
    assert Letter("phase", np.eye(2)).length == 0
    assert Letter("A", np.eye(2)).length == 1
    with pytest.raises(InvalidInput):
        Letter("bogus")


def test_generator_powers():
    g = random_unitary(3, 1)
    letters = [Letter("generator", index=0, power=1), Letter("generator", index=0, power=-1)]
    assert np.allclose(evaluate(letters, MatrixModel(3), [g]), np.eye(3))


@given(seeds)
def test_matrix_round_trip(seed):
    cert = matrix_cert(seed)
    back = loads(cert.dumps())
    report = verify(back)
    assert report.ok
    assert report.residual <= 1e-8
    assert back.measured_length == 5


@given(seeds)
def test_perm_round_trip(seed):
    cert = perm_cert(seed)
    back = certificate_from_json(json.loads(json.dumps(cert.to_json())))
    assert back.target == cert.target
    assert verify(back).ok


def test_transposed_letters_detected():
    cert = matrix_cert(11)
    cert.letters[0], cert.letters[1] = cert.letters[1], cert.letters[0]
    report = verify(cert)
    assert not report.ok
    names = {c.name for c in report.failed()}
    assert "product" in names and "pattern" in names


def test_tampered_bounds_detected():
    cert = matrix_cert(3)
    cert.claimed_bound = 4
    assert {c.name for c in verify(cert).failed()} == {"length_bound"}
    cert = matrix_cert(3)
    cert.measured_length = 6
    assert {c.name for c in verify(cert).failed()} == {"measured_length"}


def test_support_claim_detected():
    cert = matrix_cert(5)
    first = cert.letters[0]
    cert.letters[0] = Letter(first.tag, first.payload, cert.letters[1].support)
    failed = {c.name for c in verify(cert).failed()}
    assert "supports" in failed


def test_report_json_shape():
    report = verify(matrix_cert(1)).to_json()
    assert set(report) == {"ok", "checks", "measured_length", "claimed_bound", "paper_bound"}
    assert all(set(c) == {"name", "ok", "detail"} for c in report["checks"])


def test_word_length_counts_conjugates():
    letters = [Letter("conjugate", np.eye(2), conjugator=np.eye(2)), Letter("generator", index=0)]
    assert word_length(letters) == 4


def test_bad_json():
    with pytest.raises(InvalidInput):
        certificate_from_json({"kind": "five_factor"})


def test_malformed_letter_is_a_failed_check():
    cert = Certificate("five_factor", np.eye(2), [Letter("generator", index=3)], 5, 5)
    report = verify(cert)
    assert not report.ok and report.checks[0].name == "evaluate"
