// Copyright 2026 The b2t Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Convenience header pulling in the whole library.

#pragma once

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"
#include "b2t/decoder/beam.hpp"
#include "b2t/decoder/config.hpp"
#include "b2t/decoder/ctc.hpp"
#include "b2t/decoder/greedy.hpp"
#include "b2t/decoder/prompts.hpp"
#include "b2t/lattice/lattice.hpp"
#include "b2t/lattice/lattice_io.hpp"
#include "b2t/lattice/softmax.hpp"
#include "b2t/lattice/vocabulary.hpp"
#include "b2t/lattice/vocabulary_io.hpp"
#include "b2t/lm/ngram.hpp"
#include "b2t/lm/remote.hpp"
#include "b2t/lm/scorer.hpp"
#include "b2t/metrics/edit_distance.hpp"
#include "b2t/metrics/overlap.hpp"
#include "b2t/metrics/report.hpp"
#include "b2t/metrics/semantic.hpp"
#include "b2t/metrics/unk_protocol.hpp"
#include "b2t/oov/auroc.hpp"
#include "b2t/oov/boosted_trees.hpp"
#include "b2t/oov/classifier.hpp"
#include "b2t/oov/detector.hpp"
#include "b2t/oov/features.hpp"
#include "b2t/oov/logistic.hpp"
#include "b2t/pooling/pooling.hpp"
#include "b2t/pooling/stats.hpp"
#include "b2t/synth/baselines.hpp"
#include "b2t/synth/corpus.hpp"
#include "b2t/synth/generator.hpp"
