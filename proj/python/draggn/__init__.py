# Copyright 2026 The DRAGGN Authors.
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

"""Python access to the DRAGGN grounding pipeline."""

import json

from draggn._core import (
    DraggnError,
    GroundingError,
    ParseError,
    all_pairs,
    default_map_text,
    render_map,
    tokenize,
)
from draggn import _core

__all__ = [
    "DraggnError",
    "GroundingError",
    "Model",
    "ParseError",
    "all_pairs",
    "default_map_text",
    "describe_map",
    "execute",
    "generate_corpus",
    "render_map",
    "tokenize",
]


def describe_map(text=""):
    """Size, start state and rooms of a map ("" for the built-in one)."""
    return json.loads(_core.map_json(text))


def generate_corpus(spec=None):
    """Records of a synthetic corpus as dicts; |spec| holds key=value overrides."""
    spec = {k: str(v) for k, v in (spec or {}).items()}
    return [json.loads(line) for line in _core.generate_corpus_json(spec)]


def execute(pair, map_text="", slip=0.0, seed=0, max_steps=200):
    """Grounds a "unit arg" pair on the map and runs it from the start state."""
    return json.loads(_core.execute_json(pair, map_text, slip, seed, max_steps))


class Model:
    """A grounding model, trained here or loaded from a checkpoint."""

    def __init__(self, core):
        self._core = core

    @classmethod
    def load(cls, path):
        return cls(_core.Model.load(str(path)))

    @classmethod
    def train(cls, arch, examples, **options):
        """|examples| is a list of (text, "unit arg") tuples."""
        return cls(_core.Model.train(arch, list(examples), **options))

    @property
    def architecture(self):
        return self._core.architecture

    def predict(self, text):
        return self._core.predict(text)

    def ground(self, text, map_text=""):
        return json.loads(self._core.ground_json(text, map_text))

    def save(self, path):
        self._core.save(str(path))
