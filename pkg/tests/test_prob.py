from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from synfilt.prob import (
    FiniteProbSpace,
    NullPreservationError,
    PointMap,
    RandomVariable,
    compose_maps,
    conditional_expectation,
    dump_fixture,
    events,
    integrate,
    is_null_preserving,
    load_fixture,
    pushforward,
    random_instance,
    verify_tower,
)

FIXTURE = Path(__file__).parent / "fixtures" / "collapse.json"


@pytest.fixture
def fx():
    return load_fixture(FIXTURE)


def brute_integral(f, phi_assign, masses, target_event):
    """Sum of f * mass over the preimage, computed without the library."""
    return sum(f[x] * masses[x] for x in masses if phi_assign[x] in target_event)


def test_space_validation():
    with pytest.raises(ValueError):
        FiniteProbSpace({"a": 0.5, "b": 0.4})
    with pytest.raises(ValueError):
        FiniteProbSpace({"a": -0.5, "b": 1.5})
    with pytest.raises(ValueError):
        FiniteProbSpace({})


def test_map_and_variable_validation(fx):
    X, Y = fx["spaces"]["X"], fx["spaces"]["Y"]
    with pytest.raises(ValueError):
        PointMap(X, Y, {"a": "u"})
    with pytest.raises(ValueError):
        PointMap(X, Y, {"a": "u", "b": "u", "c": "v", "d": "nowhere"})
    with pytest.raises(ValueError):
        RandomVariable(X, {"a": 1.0})


def test_null_preservation(fx):
    X = fx["spaces"]["X"]
    assert is_null_preserving(PointMap.identity(X))
    assert is_null_preserving(fx["maps"]["collapse"])
    assert is_null_preserving(fx["maps"]["into_larger"])
    assert not is_null_preserving(fx["maps"]["onto_null"])
    const = PointMap(X, fx["spaces"]["N"], {x: "v" for x in X})
    assert is_null_preserving(const)


def test_pushforward_examples():
    X = FiniteProbSpace({"a": 0.3, "b": 0.7})
    assert pushforward(PointMap.identity(X)).mass == X.mass
    point = FiniteProbSpace({"*": 1.0})
    assert pushforward(PointMap(X, point, {"a": "*", "b": "*"})).mass == {"*": 1.0}
    U = FiniteProbSpace.uniform("abc")
    two = FiniteProbSpace({"p": 0.5, "q": 0.5})
    pushed = pushforward(PointMap(U, two, {"a": "p", "b": "p", "c": "q"}))
    assert pushed["p"] == pytest.approx(2 / 3, abs=1e-15)
    assert pushed["q"] == pytest.approx(1 / 3, abs=1e-15)


def test_collapse_example(fx):
    f, phi = fx["variables"]["f"], fx["maps"]["collapse"]
    g = conditional_expectation(f, phi)
    assert g.values == {"u": 2.0, "v": 6.0}
    X = phi.source
    for event in events(phi.target):
        assert integrate(g, event) == pytest.approx(
            brute_integral(f, phi.assignment, X.mass, set(event)), abs=1e-12)


def test_null_target_gets_zero(fx):
    g = conditional_expectation(fx["variables"]["f"], fx["maps"]["into_larger"])
    assert g["z"] == 0.0
    assert (g["u"], g["v"]) == (2.0, 6.0)


def test_rejects_non_null_preserving(fx):
    with pytest.raises(NullPreservationError):
        conditional_expectation(fx["variables"]["f"], fx["maps"]["onto_null"])


def test_identity_and_constants(fx):
    f = fx["variables"]["f"]
    X = f.space
    assert conditional_expectation(f, PointMap.identity(X)).agrees_almost_surely(f)
    c = RandomVariable.constant(X, 4.5)
    g = conditional_expectation(c, fx["maps"]["collapse"])
    assert all(v == pytest.approx(4.5, abs=1e-15) for v in g.values.values())


def test_tower_trivial_cases(fx):
    f, phi = fx["variables"]["f"], fx["maps"]["collapse"]
    assert verify_tower(f, phi, PointMap.identity(phi.target))
    assert verify_tower(f, PointMap.identity(phi.source), phi)


def test_tower_six_three_two(rng):
    X = FiniteProbSpace(dict(zip("abcdef", rng.dirichlet(np.ones(6)))))
    phi_assign = {"a": "p", "b": "p", "c": "q", "d": "q", "e": "r", "f": "r"}
    Y = pushforward(PointMap(X, FiniteProbSpace.uniform("pqr"), phi_assign))
    phi = PointMap(X, Y, phi_assign)
    psi_assign = {"p": "L", "q": "L", "r": "R"}
    Z = pushforward(PointMap(Y, FiniteProbSpace.uniform("LR"), psi_assign))
    psi = PointMap(Y, Z, psi_assign)
    f = RandomVariable(X, dict(zip("abcdef", rng.normal(size=6))))
    assert verify_tower(f, phi, psi)
    # direct summation of both sides
    for z in "LR":
        direct = sum(f[x] * X[x] for x in X if psi_assign[phi_assign[x]] == z) / Z[z]
        g = {y: sum(f[x] * X[x] for x in X if phi_assign[x] == y) / Y[y] for y in "pqr"}
        nested = sum(g[y] * Y[y] for y in "pqr" if psi_assign[y] == z) / Z[z]
        assert direct == pytest.approx(nested, abs=1e-12)


def test_compose_maps_rejects_mismatch(fx):
    phi = fx["maps"]["collapse"]
    with pytest.raises(ValueError):
        compose_maps(phi, phi)


def test_random_instances_satisfy_identity(rng):
    for _ in range(500):
        f, phi, psi = random_instance(rng, 8)
        assert is_null_preserving(phi) and is_null_preserving(psi)
        g = conditional_expectation(f, phi)
        for event in events(phi.target):
            expected = brute_integral(f, phi.assignment, phi.source.mass, set(event))
            assert abs(integrate(g, event) - expected) <= 1e-12
        assert verify_tower(f, phi, psi)


def test_unit_preserved_almost_surely(rng):
    for _ in range(100):
        f, phi, _ = random_instance(rng, 8)
        one = conditional_expectation(RandomVariable.constant(f.space, 1.0), phi)
        for y in phi.target:
            if phi.target[y] > 0:
                # E[1] is preimage mass over target mass: 1 for the pushforward measure
                assert one[y] == pytest.approx(pushforward(phi)[y] / phi.target[y], abs=1e-12)
        Y = pushforward(phi)
        onto_push = PointMap(phi.source, Y, phi.assignment)
        one = conditional_expectation(RandomVariable.constant(f.space, 1.0), onto_push)
        assert all(abs(one[y] - 1.0) <= 1e-12 for y in Y if Y[y] > 0)


@settings(max_examples=200)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    f, phi, _ = random_instance(rng, 8)
    h = RandomVariable(f.space, {x: float(v) for x, v in zip(f.space, rng.normal(size=len(f.space)))})
    lhs = conditional_expectation(a * f + b * h, phi)
    rhs = a * conditional_expectation(f, phi) + b * conditional_expectation(h, phi)
    assert lhs.agrees_almost_surely(rhs, 1e-10)


def test_fixture_roundtrip(fx):
    doc = dump_fixture(fx["spaces"], fx["maps"], fx["variables"])
    again = load_fixture(doc)
    g1 = conditional_expectation(fx["variables"]["f"], fx["maps"]["collapse"])
    g2 = conditional_expectation(again["variables"]["f"], again["maps"]["collapse"])
    assert g1.values == g2.values
