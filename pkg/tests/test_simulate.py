"""Synthetic response generation from parametric items."""

import json

import numpy as np
import pytest
from scipy.special import expit

from irtsmooth.errors import DomainError, InputError, ParseError
from irtsmooth.simulate import (ParametricItem, load_items, scoring_for_items,
                                simulate_responses)


class TestParametricItem:
    def test_twopl_probabilities(self):
        item = ParametricItem("2pl", 1.5, (0.5,))
        probs = item.probabilities(np.array([-1.0, 0.5, 2.0]))
        np.testing.assert_allclose(probs[:, 1],
                                   expit(1.5 * (np.array([-1.0, 0.5, 2.0]) - 0.5)),
                                   atol=1e-15)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-15)

    def test_graded_probabilities_sum_to_one(self):
        item = ParametricItem("graded", 1.2, (-1.0, 0.0, 1.5))
        thetas = np.linspace(-4, 4, 50)
        probs = item.probabilities(thetas)
        assert probs.shape == (50, 4)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(probs >= 0.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            ParametricItem("2pl", 0.0, (0.0,))
        with pytest.raises(DomainError):
            ParametricItem("graded", 1.0, (0.0, 0.0))
        with pytest.raises(InputError):
            ParametricItem("3pl", 1.0, (0.0,))
        with pytest.raises(InputError):
            ParametricItem("2pl", 1.0, (0.0, 1.0))


class TestSimulateResponses:
    def test_same_seed_reproduces(self):
        items = [ParametricItem("2pl", 1.0, (0.0,)),
                 ParametricItem("graded", 1.0, (-1.0, 1.0))]
        a, thetas_a, _ = simulate_responses(items, 50, seed=123)
        b, thetas_b, _ = simulate_responses(items, 50, seed=123)
        np.testing.assert_array_equal(a.selections, b.selections)
        np.testing.assert_array_equal(thetas_a, thetas_b)

    def test_near_step_item_limit(self):
        # a = 50 approximates a step at b = 0: able subjects almost always
        # select the correct option
        items = [ParametricItem("2pl", 50.0, (0.0,))]
        data, thetas, _ = simulate_responses(items, 20000, seed=3)
        able = thetas > 0.2
        rate = np.mean(data.selections[able, 0] == 2)
        assert rate > 0.999

    def test_empirical_frequencies_converge(self):
        item = ParametricItem("graded", 1.3, (-0.8, 0.4))
        items = [item]
        data, thetas, true_occ = simulate_responses(items, 100000, seed=29)
        window = np.abs(thetas - 0.5) < 0.1
        empirical = np.bincount(data.selections[window, 0] - 1,
                                minlength=3) / window.sum()
        expected = true_occ(0, thetas[window]).mean(axis=0)
        np.testing.assert_allclose(empirical, expected, atol=0.01)

    def test_evaluator_matches_item(self):
        items = [ParametricItem("2pl", 0.9, (-0.3,))]
        _, _, true_occ = simulate_responses(items, 10, seed=1)
        thetas = np.array([-1.0, 0.0, 1.0])
        np.testing.assert_array_equal(true_occ(0, thetas),
                                      items[0].probabilities(thetas))

    def test_scoring_helper(self):
        items = [ParametricItem("2pl", 1.0, (0.0,)),
                 ParametricItem("graded", 1.0, (-1.0, 1.0))]
        formats, key = scoring_for_items(items)
        assert key == [2, 3]


class TestLoadItems:
    def test_round_trip(self, tmp_path):
        spec = [{"kind": "2pl", "a": 1.4, "b": -0.2},
                {"kind": "graded", "a": 0.9, "thresholds": [-1.0, 0.5]}]
        path = tmp_path / "items.json"
        path.write_text(json.dumps(spec))
        items = load_items(str(path))
        assert items[0].kind == "2pl"
        assert items[0].locations == (-0.2,)
        assert items[1].n_options == 3

    def test_bad_json_rejected(self, tmp_path):
        path = tmp_path / "items.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_items(str(path))

    def test_invalid_item_reported_with_position(self, tmp_path):
        path = tmp_path / "items.json"
        path.write_text(json.dumps([{"kind": "2pl", "a": -1.0, "b": 0.0}]))
        with pytest.raises(ParseError) as err:
            load_items(str(path))
        assert "item 1" in str(err.value)
