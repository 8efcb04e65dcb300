# Copyright 2026 The Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

import selver


def test_weight_vector():
    assert selver.weight_vector([[1, 2], [3, 4], [5, 6]]) == [9, 12]
    assert selver.weight_vector([], m=3) == [0, 0, 0]


def test_power_allocation():
    a = selver.allocation("power:3", [2, 1])
    assert a["probs"] == pytest.approx([8 / 9, 1 / 9], abs=1e-12)
    assert a["null"] == 0


def test_partial_power_allocation():
    a = selver.allocation("partial:1:2", [1, 0])
    assert a["probs"][0] == pytest.approx(0.5 / math.sqrt(2), abs=1e-12)
    assert a["null"] == pytest.approx(1 - 0.5 / math.sqrt(2), abs=1e-12)


def test_bot_probabilities_worked_instance():
    b = selver.bot_probabilities([1, 1], [1, 0], 1, 2)
    assert b["pr_bot"] == pytest.approx(13 / 16, abs=1e-12)
    assert b["p"][0] == pytest.approx(0.358219, abs=1e-6)
    assert b["p"][1] == pytest.approx(0, abs=1e-12)


def test_bot_unreachable_raises():
    with pytest.raises(ArithmeticError):
        selver.bot_probabilities([1, 1], [1, 1], 1, 2)


def test_run_is_deterministic():
    rows = [[1, 0], [0.75, 0.25]]
    a = selver.run("power:2", rows, seed=5, stream=3)
    b = selver.run("power:2", rows, seed=5, stream=3)
    assert a == b
    assert len(a["verified"]) <= 2


def test_empirical_matches_closed_form():
    rows = [[1, 0, 0.5], [0.2, 0.3, 0.1]]
    w = selver.weight_vector(rows)
    target = selver.allocation("power:2", w)
    emp = selver.empirical_distribution("power:2", rows, trials=20000, seed=1)
    tv = selver.tv_distance(emp["probs"], emp["null"], target["probs"],
                            target["null"])
    assert tv < 0.03


def test_robustness_audit_flags_leaky_control():
    reported = [[1, 0], [0, 50]]
    truth = [[1, 0], [0, 1]]
    honest = json.loads(selver.robustness_audit("power:3", reported, truth,
                                                trials=20000, seed=2))
    leaky = json.loads(selver.robustness_audit("leaky:3", reported, truth,
                                               trials=20000, seed=2))
    assert honest["pass"]
    assert not leaky["pass"]


def test_participation_counterexample():
    margin = selver.participation_margin("power:1", [[1, 0], [0.75, 0.25]], 1)
    assert margin == pytest.approx(0.6875 / 0.75, abs=1e-12)


def test_greedy_line():
    facilities, verified = selver.greedy_on_line([0, 4, 5, 10], [0, 1, 2, 3],
                                                 k=2)
    assert facilities == [0, 3]
    assert verified == [0, 3]


def test_proportional_distribution_sums_to_one():
    dist = selver.proportional_distribution_on_line([0, 1, 3], [0, 1, 2], 2)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert dist[(0, 2)] == pytest.approx((3 / 4 + 3 / 5) / 3, abs=1e-12)


def test_lower_bound_shape():
    rows = selver.lower_bound_instance(4, 3, seed=9)
    assert len(rows) == 12
    assert all(len(r) == 4 for r in rows)
