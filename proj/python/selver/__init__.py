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

"""Mechanisms without money that use selective verification."""

from selver._core import (
    allocation,
    bot_probabilities,
    empirical_distribution,
    greedy_on_line,
    lower_bound_instance,
    participation_margin,
    proportional_distribution_on_line,
    robustness_audit,
    run,
    tv_distance,
    weight_vector,
)

__all__ = [
    "allocation",
    "bot_probabilities",
    "empirical_distribution",
    "greedy_on_line",
    "lower_bound_instance",
    "participation_margin",
    "proportional_distribution_on_line",
    "robustness_audit",
    "run",
    "tv_distance",
    "weight_vector",
]
