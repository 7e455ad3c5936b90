# Copyright 2026 The conlid Authors.
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

"""Character n-gram language identification with contrastive training."""

from conlid._conlid import (
    ConfigError,
    DataError,
    Error,
    FormatError,
    IoError,
    Model,
    Prediction,
    StepRecord,
    TrainingError,
    agreement,
    char_ngrams,
    ensemble_avg,
    ensemble_max,
    evaluate_recovery,
    fnv1a32,
    hard_negatives,
    hash_ngram,
    metrics,
    split,
    tokenize,
    train,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "FormatError",
    "IoError",
    "Model",
    "Prediction",
    "StepRecord",
    "TrainingError",
    "agreement",
    "char_ngrams",
    "ensemble_avg",
    "ensemble_max",
    "evaluate_recovery",
    "fnv1a32",
    "hard_negatives",
    "hash_ngram",
    "metrics",
    "split",
    "tokenize",
    "train",
]
