import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_stateset
from usdbound.statesets import (
    InstanceError,
    gram,
    make_stateset,
    parse_stateset,
    states_from_gram,
)

EXAMPLE_I_JSON = json.dumps(
    {
        "dim": 3,
        "states": [
            [1, 0, 0],
            [[1 / 3**0.5, 0], [1 / 3**0.5, 0], [1 / 3**0.5, 0]],
            [1 / 3**0.5, 1 / 3**0.5, -(1 / 3**0.5)],
        ],
        "priors": [1 / 3, 1 / 3, 1 / 3],
    }
)


def test_parse_example_one():
    s = parse_stateset(EXAMPLE_I_JSON)
    assert s.dim == 3 and s.n_states == 3
    np.testing.assert_allclose(s.priors, [1 / 3] * 3)


def test_parse_orthonormal_pair():
    s = parse_stateset('{"dim": 2, "states": [[1, 0], [0, 1]], "priors": [0.5, 0.5]}')
    assert s.n_states == 2


def test_missing_priors_are_uniform():
    s = parse_stateset('{"dim": 3, "states": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}')
    np.testing.assert_allclose(s.priors, [1 / 3] * 3)


def test_complex_entries():
    s = parse_stateset('{"dim": 2, "states": [[[0, 1], 0], [[0.6, 0], [0, 0.8]]]}')
    assert s.states[0, 0] == 1j
    assert s.states[1, 1] == 0.8j


def test_duplicate_state_is_dependent():
    with pytest.raises(InstanceError, match="linearly dependent"):
        parse_stateset('{"dim": 2, "states": [[1, 0], [1, 0]]}')


@pytest.mark.parametrize(
    "text, match",
    [
        ("not json", "malformed"),
        ("[1, 2]", "JSON object"),
        ('{"states": [[1, 0], [0, 1]]}', "dim"),
        ('{"dim": 3, "states": [[1, 0], [0, 1]]}', "expected dim=3"),
        ('{"dim": 2, "states": [[1, 0], [0, 2]]}', "norm"),
        ('{"dim": 2, "states": [[1, 0], [0, 1]], "priors": [0.5, 0.6]}', "sum"),
        ('{"dim": 2, "states": [[1, 0], [0, 1]], "priors": [1.0, 0.0]}', "strictly"),
        ('{"dim": 2, "states": [[1, 0], [0, 1]], "priors": [1.0]}', "expected 2 priors"),
        ('{"dim": 1, "states": [[1]]}', "at least two"),
        ('{"dim": 2, "states": [[1, 0], [0, 1], [1, 1]]}', "smaller than"),
        ('{"dim": 2, "states": [[1, "a"], [0, 1]]}', "component"),
    ],
)
def test_malformed_instances(text, match):
    with pytest.raises(InstanceError, match=match):
        parse_stateset(text)


def test_normalize_flag_rescales():
    text = '{"dim": 2, "states": [[2, 0], [1, 1]], "priors": [2, 6]}'
    with pytest.raises(InstanceError):
        parse_stateset(text)
    s = parse_stateset(text, normalize=True)
    np.testing.assert_allclose(np.linalg.norm(s.states, axis=1), 1.0)
    np.testing.assert_allclose(s.priors, [0.25, 0.75])


def test_stateset_is_immutable(example1):
    with pytest.raises(ValueError):
        example1.states[0, 0] = 2.0


def test_gram_example_one(example1):
    g = gram(example1)
    assert g.moduli[0, 1] == pytest.approx(1 / np.sqrt(3), abs=1e-15)
    assert g.moduli[0, 2] == pytest.approx(1 / np.sqrt(3), abs=1e-15)
    assert g.moduli[1, 2] == pytest.approx(1 / 3, abs=1e-15)
    np.testing.assert_array_equal(g.phases, 0.0)


def test_gram_examples_two_three(example2):
    g = gram(example2)
    assert g.moduli[0, 1] == pytest.approx(1 / np.sqrt(5), abs=1e-15)
    assert g.moduli[0, 2] == pytest.approx(2 / np.sqrt(17), abs=1e-15)
    assert g.moduli[1, 2] == pytest.approx(6 / np.sqrt(85), abs=1e-15)
    np.testing.assert_array_equal(g.phases, 0.0)


def test_gram_orthonormal_is_identity():
    g = gram(make_stateset(np.eye(3)))
    np.testing.assert_array_equal(g.gram, np.eye(3))


def test_gram_negative_real_overlap_has_phase_pi():
    s = make_stateset([[1, 0], [-0.6, 0.8]])
    g = gram(s)
    assert g.phases[0, 1] == pytest.approx(np.pi)
    assert g.phases[1, 0] == pytest.approx(-np.pi)


def test_gram_invariants(rng):
    for _ in range(20):
        s = random_stateset(rng, int(rng.integers(2, 6)), real=False)
        g = gram(s)
        np.testing.assert_allclose(g.gram, g.gram.conj().T, atol=0)
        np.testing.assert_allclose(g.gram.diagonal(), 1.0, atol=1e-12)
        iu = np.triu_indices(s.n_states, 1)
        rebuilt = g.moduli[iu] * np.exp(1j * g.phases[iu])
        np.testing.assert_allclose(rebuilt, g.gram[iu], atol=1e-12)
        assert np.all(g.phases[iu] > -np.pi) and np.all(g.phases[iu] <= np.pi)
        assert np.linalg.eigvalsh(g.gram)[0] > 0


def test_gram_idempotent_under_reserialization(rng):
    s = random_stateset(rng, 4, d=5)
    again = parse_stateset(s.to_json())
    np.testing.assert_array_equal(gram(s).gram, gram(again).gram)


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(2, 4),
    extra=st.integers(0, 2),
    rank_drop=st.booleans(),
    seed=st.integers(0, 2**32 - 1),
)
def test_independence_matches_matrix_rank(n, extra, rank_drop, seed):
    r = np.random.default_rng(seed)
    d = n + extra
    a = r.normal(size=(n, d)) + 1j * r.normal(size=(n, d))
    if rank_drop:
        a[-1] = a[0] * 0.3 - a[1] * 0.7
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    independent = np.linalg.matrix_rank(a, tol=1e-8) == n
    lam = np.linalg.eigvalsh(a.conj() @ a.T)[0]
    assert (lam > 1e-10) == independent
    if independent:
        make_stateset(a)
    else:
        with pytest.raises(InstanceError):
            make_stateset(a)


def test_states_from_gram_roundtrip(rng):
    s = random_stateset(rng, 3)
    rebuilt = states_from_gram(gram(s).gram)
    np.testing.assert_allclose(gram(rebuilt).gram, gram(s).gram, atol=1e-12)
