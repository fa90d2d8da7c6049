// Copyright 2026 The USR Toolkit Authors.
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

#ifndef USR_CORPUS_HPP_
#define USR_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "usr/tokenize.hpp"

namespace usr {

// System id given to original corpus responses. The benchmark excludes these
// from correlation unless asked not to.
inline constexpr std::string_view kGroundTruthSystem = "ground-truth";

struct DialogContext {
  std::vector<TokenSequence> turns;  // oldest first, never empty once loaded
  std::vector<std::string> speaker_tags;  // empty, or one per turn

  // All turns concatenated in order.
  TokenSequence flattened() const;
  std::size_t token_count() const;
};

struct DialogExample {
  std::string example_id;
  DialogContext context;
  TokenSequence fact;  // empty when the corpus has no grounding
  TokenSequence response;
  std::optional<TokenSequence> reference;
  std::string system_id;

  bool is_ground_truth() const { return system_id == kGroundTruthSystem; }
};

// The six rated qualities, in annotation-schema order. The first five form a
// QualityVector; kOverall is the regression target.
enum class QualityDimension {
  kUnderstandable,
  kNatural,
  kMaintainsContext,
  kInteresting,
  kUsesKnowledge,
  kOverall,
};

inline constexpr std::array<QualityDimension, 6> kAllDimensions = {
    QualityDimension::kUnderstandable,   QualityDimension::kNatural,
    QualityDimension::kMaintainsContext, QualityDimension::kInteresting,
    QualityDimension::kUsesKnowledge,    QualityDimension::kOverall,
};

// Schema name, e.g. "maintains_context".
std::string_view dimension_name(QualityDimension dim);
// Accepts the schema names; throws ArgumentError otherwise.
QualityDimension parse_dimension(std::string_view name);

struct RatingRange {
  int min;
  int max;
};
RatingRange rating_range(QualityDimension dim);

struct QualityAnnotation {
  std::string example_id;
  std::string annotator_id;
  int understandable = 0;     // 0-1
  int natural = 1;            // 1-3
  int maintains_context = 1;  // 1-3
  int interesting = 1;        // 1-3
  int uses_knowledge = 0;     // 0-1
  int overall = 1;            // 1-5

  int rating(QualityDimension dim) const;
  void set_rating(QualityDimension dim, int value);
};

class AnnotatedDataset {
 public:
  std::vector<DialogExample> examples;
  std::vector<QualityAnnotation> annotations;

  // Checks id uniqueness, rating ranges and that every annotation resolves.
  // Throws IntegrityError or RangeError.
  void validate() const;

  const DialogExample* find(std::string_view example_id) const;
  std::vector<const QualityAnnotation*> annotations_for(
      std::string_view example_id) const;
  // Sorted, de-duplicated annotator ids.
  std::vector<std::string> annotator_ids() const;
};

enum class DatasetFormat { kCanonicalJsonl, kTopicalChat, kPersonaChat };

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view dataset_format_name(DatasetFormat format);

// Loads and validates a dataset. The topical-chat and persona-chat adapters
// accept either the released per-context annotation JSON (an array of
// {"context","fact","responses":[...]}) or the raw dialog corpus (Topical-Chat
// conversation JSON; ConvAI2 text format for PersonaChat). Text is normalized
// with normalize_tokens in every adapter.
AnnotatedDataset load_dataset(const std::filesystem::path& path,
                              DatasetFormat format);

AnnotatedDataset parse_canonical_jsonl(std::istream& in);
AnnotatedDataset parse_usr_annotations(std::string_view json_text,
                                       std::string_view dataset_tag);
AnnotatedDataset parse_topical_chat_dialogs(std::string_view json_text);
AnnotatedDataset parse_convai2_dialogs(std::istream& in);

// One JSON object per line: examples first, then annotations, in stored order.
void write_canonical_jsonl(const AnnotatedDataset& dataset, std::ostream& out);
std::string to_canonical_jsonl(const AnnotatedDataset& dataset);

// Content hash of the canonical serialization.
std::string dataset_fingerprint(const AnnotatedDataset& dataset);

// Retrieval-training pairs.
enum class RetrievalVariant { kContext, kFact };

std::string_view retrieval_variant_name(RetrievalVariant variant);

struct RetrievalExample {
  TokenSequence x;
  TokenSequence r;
  int y = 0;

  bool operator==(const RetrievalExample&) const = default;
};

// The x side of a retrieval pair: dialog history followed by the fact for
// kContext, the fact alone for kFact.
TokenSequence retrieval_input(const DialogExample& example,
                              RetrievalVariant variant);

// For every example emits its gold pair (y=1) followed by `negative_ratio`
// pairs (y=0) whose response is drawn uniformly without replacement from the
// corpus responses that differ token-wise from the gold one.
std::vector<RetrievalExample> build_retrieval_examples(
    const std::vector<DialogExample>& corpus, RetrievalVariant variant,
    int negative_ratio, std::uint64_t seed);

}  // namespace usr

#endif  // USR_CORPUS_HPP_
