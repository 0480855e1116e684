# Copyright 2026 The ldpfisher Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Fisher information and estimation under local differential privacy."""

import json

from ldpfisher._core import *  # noqa: F401,F403
from ldpfisher._core import _lower_bound_json, _run_experiment_json

__version__ = "0.1.0"


def minimax_lower_bound(model, n, eps, s=1.0, domain=None):
    """Van Trees lower bound report for a model spec such as {"kind": "multinomial", "d": 4}."""
    text = _lower_bound_json(json.dumps(model), json.dumps(domain or {}), s, n, eps)
    return json.loads(text)


def run_experiment(config):
    """Runs a risk sweep; returns (report dict, CSV text)."""
    report, csv = _run_experiment_json(json.dumps(config))
    return json.loads(report), csv
