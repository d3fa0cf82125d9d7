import json

import numpy as np
import pytest

modop = pytest.importorskip("modop")


def op(m):
    return modop.Operator.from_matrix(np.asarray(m, dtype=complex))


def test_polar_of_shift():
    t = op([[0, 1], [0, 0]])
    v, a = modop.polar(t)
    assert np.allclose(v.embed(), [[0, 1], [0, 0]])
    assert np.allclose(a.embed(), np.diag([0, 1]))
    assert modop.check_polar_conditions(t)["passed"]


def test_operator_blocks_and_json_roundtrip():
    t = modop.random_operator([2, 1], 3, seed=5)
    assert t.shape == [2, 1]
    assert [b.shape for b in t.blocks] == [(6, 6), (3, 3)]
    assert modop.Operator.from_json(t.to_json()) == t
    assert t.embed().shape == (9, 9)
    assert abs(t.norm() - np.linalg.norm(t.embed(), 2)) < 1e-12 * t.norm()


def test_normality_predicates():
    assert modop.is_normal(op([[0, 1], [-1, 0]]))[0]
    holds, residual = modop.is_normal(op([[0, 1], [0, 0]]))
    assert not holds and residual == pytest.approx(0.5)


def test_unitary_constructions():
    t = op(np.diag([1j, 0]))
    u, report = modop.build_unitary_abs(t)
    assert np.allclose(u.embed(), np.diag([1j, 1]))
    assert report["passed"]
    u, report = modop.build_unitary_star(t)
    assert np.allclose(u.embed(), np.diag([-1, 1]))
    n = modop.random_normal([3], 2, seed=1)
    u, _ = modop.build_unitary_star(n)
    assert modop.verify_converse_star(n, u)["passed"]


def test_kaplansky_archetype():
    k = modop.kaplansky_check(op(np.diag([1, 2])), op([[0, 1], [0.5, 0]]))
    assert k["status"] == "agree"
    assert not k["lhs_st_normal"]["holds"]
    assert not k["rhs_s_commutes_abs"]["holds"]


def test_intertwiners_and_fuglede():
    t, s = op(np.diag([1, 2])), op(np.diag([2, 1]))
    basis = modop.solve_intertwiners(t, s)
    assert len(basis) == 2
    assert modop.fuglede_putnam_check(t, s, basis[0] + basis[1])["passed"]


def test_bounded_transform_roundtrip():
    t = op(np.diag([3, 4]))
    f = modop.bounded_transform(t)
    assert np.allclose(f.embed(), np.diag([3 / np.sqrt(10), 4 / np.sqrt(17)]))
    assert np.allclose(modop.inverse_transform(f).embed(), t.embed())
    with pytest.raises(modop.ModopError):
        modop.inverse_transform(op(np.eye(2)))


def test_run_suite_is_deterministic():
    a = modop.run_suite(trials=2, seed=3, suites=["polar_conditions", "kaplansky"])
    b = modop.run_suite(trials=2, seed=3, suites=["polar_conditions", "kaplansky"])
    a.pop("wallclock_ms")
    b.pop("wallclock_ms")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert all(s["fail"] == 0 for s in a["suites"])


def test_invalid_config_raises():
    with pytest.raises(modop.ModopError):
        modop.run_suite(trials=0)
