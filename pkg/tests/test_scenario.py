import json

import numpy as np
import pytest

from wceop.scenario import (
    E_EXPONENT,
    E_FIELD,
    E_JSON,
    E_LENGTH,
    E_MASS,
    E_PARTITION,
    REGIMES,
    GeneratorConfig,
    ScenarioError,
    dump_scenario,
    generate,
    generate_instance,
    load_scenario,
    parse_scenario,
    recompute_euw,
    regime_holds,
    save_scenario,
)

MINIMAL = {"masses": [1], "partition": [[0]], "u": [[1, 0]], "w": [[1, 0]], "p": 2}


def with_(**kw):
    return json.dumps({**MINIMAL, **kw})


def code_of(text):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    return exc.value.code


class TestParsing:
    def test_minimal(self):
        T = parse_scenario(json.dumps(MINIMAL))
        np.testing.assert_array_equal(T.euw, [1])
        assert T.p == 2

    def test_plain_numbers_and_inf(self):
        T = parse_scenario(with_(u=[2], p="inf"))
        assert T.u[0] == 2 and T.p == float("inf")

    def test_diagnostics(self):
        assert code_of(with_(masses=[0])) == E_MASS
        assert code_of(with_(masses=[-1])) == E_MASS
        assert code_of(with_(partition=[[0], [0]])) == E_PARTITION
        assert code_of(with_(partition=[[1]])) == E_PARTITION
        assert code_of(with_(u=[[1, 0], [1, 0]])) == E_LENGTH
        assert code_of(with_(p=0.5)) == E_EXPONENT
        assert code_of(with_(p=True)) == E_EXPONENT
        assert code_of(json.dumps({k: v for k, v in MINIMAL.items() if k != "w"})) == E_FIELD
        assert code_of("[1, 2]") == E_FIELD

    def test_json_error_reports_position(self):
        with pytest.raises(ScenarioError) as exc:
            parse_scenario('{\n  "masses": [1,\n}')
        assert exc.value.code == E_JSON
        assert "line 3" in str(exc.value)

    def test_round_trip_is_bit_exact(self, tmp_path):
        T = generate_instance(1, 4)
        path = tmp_path / "t.json"
        save_scenario(T, path, name="x")
        S = load_scenario(path)
        np.testing.assert_array_equal(S.u, T.u)
        np.testing.assert_array_equal(S.w, T.w)
        np.testing.assert_array_equal(S.space.masses, T.space.masses)
        assert S.algebra.blocks == T.algebra.blocks
        assert json.loads(path.read_text())["name"] == "x"


class TestGenerator:
    def test_deterministic_bytes(self):
        for regime in REGIMES:
            a = dump_scenario(generate_instance(7, 3, regime))
            b = dump_scenario(generate_instance(7, 3, regime))
            assert a == b
        assert dump_scenario(generate_instance(7, 3)) != dump_scenario(generate_instance(7, 4))

    @pytest.mark.parametrize("regime", REGIMES)
    def test_regime_post_conditions(self, regime):
        for i in range(25):
            T = generate_instance(2, i, regime, max_points=8)
            assert regime_holds(T, regime)
            assert 1 <= T.n <= 8
            assert np.all((T.space.masses >= 0.1) & (T.space.masses <= 10))
            np.testing.assert_allclose(T.euw, recompute_euw(T), atol=1e-12 * max(1, np.max(np.abs(T.euw))))

    def test_free_moduli(self):
        for i in range(25):
            T = generate_instance(3, i)
            assert np.all(np.abs(T.u) <= 2) and np.all(np.abs(T.w) <= 2)

    def test_shapes(self):
        for i in range(10):
            T = generate_instance(4, i, shape="nonnegative")
            assert np.all(T.u.imag == 0) and np.all(T.u.real >= 0) and np.all(T.w.real >= 0)
            P = generate_instance(4, i, "contractive", shape="positive")
            np.testing.assert_allclose(P.u, np.conj(P.w))

    def test_p_is_passed_through(self):
        assert generate_instance(5, 0, p=3.0).p == 3.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GeneratorConfig(regime="weird")
        with pytest.raises(ValueError):
            GeneratorConfig(shape="weird")
        with pytest.raises(ValueError):
            GeneratorConfig(max_points=0)

    def test_single_point_space(self):
        T = generate(GeneratorConfig(seed=3, max_points=1))
        assert T.n == 1
