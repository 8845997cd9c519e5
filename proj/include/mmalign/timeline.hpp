#pragma once

// Element streams on a shared session clock, interval overlap, explicit
// temporal joins between streams and cross-modal queries.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mmalign::timeline {

/// Half-open interval [start, end) in seconds. A point sample has
/// start == end and `point` set; its overlap with anything is zero.
struct TimeInterval {
  double start = 0.0;
  double end = 0.0;
  bool point = false;

  double duration() const noexcept { return end - start; }
  bool contains(double t) const noexcept { return t >= start && t < end; }

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Length of the intersection of two half-open intervals; 0 when disjoint
/// or when they only touch.
double overlap(const TimeInterval& a, const TimeInterval& b) noexcept;

enum class Modality { Text, Audio, Visual, Derived };

std::string_view to_string(Modality m) noexcept;
std::optional<Modality> parse_modality(std::string_view s) noexcept;

struct Word {
  std::string text;
  friend bool operator==(const Word&, const Word&) = default;
};

struct AnglePair {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  friend bool operator==(const AnglePair&, const AnglePair&) = default;
};

struct Label {
  std::string value;
  friend bool operator==(const Label&, const Label&) = default;
};

using Payload = std::variant<Word, double, AnglePair, Label>;

struct Element {
  std::string id;
  TimeInterval interval;
  Payload payload;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Immutable, sorted, validated sequence of elements from one modality of
/// one session. Only build_stream constructs non-empty streams.
class ElementStream {
 public:
  ElementStream() = default;

  Modality modality() const noexcept { return modality_; }
  const std::string& session_id() const noexcept { return session_id_; }
  const std::optional<std::string>& speaker_id() const noexcept { return speaker_id_; }
  std::span<const Element> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }

  /// Index of the element with the given id, if present.
  std::optional<std::size_t> find(std::string_view id) const;

  friend bool operator==(const ElementStream&, const ElementStream&) = default;

 private:
  friend ElementStream build_stream(Modality, std::string, std::optional<std::string>,
                                    std::vector<Element>);

  Modality modality_ = Modality::Text;
  std::string session_id_;
  std::optional<std::string> speaker_id_;
  std::vector<Element> elements_;
};

/// Validates and sorts elements by (start, end, id).
/// Throws EmptyStream, MixedPayload, NegativeInterval, DuplicateId, and
/// OverlappingWords for Text streams.
ElementStream build_stream(Modality modality, std::string session,
                           std::optional<std::string> speaker, std::vector<Element> elements);

enum class Cardinality { OneToOne, OneToMany, ManyToOne, ManyToMany };

std::string_view to_string(Cardinality c) noexcept;

struct AlignedPair {
  std::string source_id;
  std::string target_id;
  double overlap = 0.0;

  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

struct AlignmentMap {
  std::vector<AlignedPair> pairs;  // ordered by (source index, target index)
  Cardinality cardinality = Cardinality::ManyToMany;
};

/// Observed cardinality of a pair relation. An empty relation reports
/// ManyToMany.
Cardinality observed_cardinality(std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Index pairs (i, j) with overlap(source[i], target[j]) > min_overlap,
/// ordered by (i, j). Both inputs must be sorted by start. Sort-merge sweep
/// over interval starts; cost O(n + m + candidate pairs).
std::vector<std::pair<std::size_t, std::size_t>> join_elements(std::span<const Element> source,
                                                               std::span<const Element> target,
                                                               double min_overlap = 0.0);

/// All element pairs whose overlap exceeds min_overlap seconds.
/// Throws SessionMismatch when the streams come from different sessions.
AlignmentMap join_streams(const ElementStream& source, const ElementStream& target,
                          double min_overlap = 0.0);

/// Predicate over the elements of streams of one modality.
struct SegmentPredicate {
  Modality modality = Modality::Derived;
  std::function<bool(const ElementStream&, const Element&)> matches;
};

struct QueryHit {
  std::string session_id;
  Element element;

  friend bool operator==(const QueryHit&, const QueryHit&) = default;
};

/// Elements of `select` streams that overlap (duration > 0) some element
/// satisfying `where` in a stream of the same session. Ordered by
/// (session, start, end, id). Throws ModalityAbsent when the corpus has no
/// stream of either modality.
std::vector<QueryHit> query_crossmodal(std::span<const ElementStream> corpus, Modality select,
                                       const SegmentPredicate& where);

/// Parses expressions of the form `<stream>.<field><op><value>`, e.g.
/// `gaze.label==AfD` or `audio.value>0.5`. Streams: text, audio, visual,
/// derived (alias gaze). Fields: word, label, value, yaw, pitch.
/// Operators: == != < <= > >=. Throws InvalidQuery.
SegmentPredicate parse_predicate(std::string_view expression);

}  // namespace mmalign::timeline
