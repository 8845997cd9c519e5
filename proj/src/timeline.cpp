#include "mmalign/timeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mmalign/error.hpp"

namespace mmalign::timeline {

double overlap(const TimeInterval& a, const TimeInterval& b) noexcept {
  const double lo = std::max(a.start, b.start);
  const double hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0.0;
}

std::string_view to_string(Modality m) noexcept {
  switch (m) {
    case Modality::Text: return "text";
    case Modality::Audio: return "audio";
    case Modality::Visual: return "visual";
    case Modality::Derived: return "derived";
  }
  return "unknown";
}

std::optional<Modality> parse_modality(std::string_view s) noexcept {
  if (s == "text") return Modality::Text;
  if (s == "audio") return Modality::Audio;
  if (s == "visual") return Modality::Visual;
  if (s == "derived" || s == "gaze") return Modality::Derived;
  return std::nullopt;
}

std::string_view to_string(Cardinality c) noexcept {
  switch (c) {
    case Cardinality::OneToOne: return "one-to-one";
    case Cardinality::OneToMany: return "one-to-many";
    case Cardinality::ManyToOne: return "many-to-one";
    case Cardinality::ManyToMany: return "many-to-many";
  }
  return "unknown";
}

std::optional<std::size_t> ElementStream::find(std::string_view id) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].id == id) return i;
  }
  return std::nullopt;
}

ElementStream build_stream(Modality modality, std::string session,
                           std::optional<std::string> speaker, std::vector<Element> elements) {
  if (elements.empty()) {
    throw Error(ErrorCode::EmptyStream, "stream for session '" + session + "' has no elements");
  }
  const std::size_t kind = elements.front().payload.index();
  std::unordered_set<std::string> ids;
  ids.reserve(elements.size());
  for (const auto& e : elements) {
    if (e.payload.index() != kind) {
      throw Error(ErrorCode::MixedPayload, "element '" + e.id + "' has a different payload kind");
    }
    const auto& iv = e.interval;
    if (!std::isfinite(iv.start) || !std::isfinite(iv.end) || iv.start < 0.0 ||
        iv.end < iv.start || (iv.end == iv.start && !iv.point) ||
        (iv.point && iv.end != iv.start)) {
      throw Error(ErrorCode::NegativeInterval, "element '" + e.id + "' has an invalid interval");
    }
    if (!ids.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateId, "element id '" + e.id + "' is not unique");
    }
  }

  std::stable_sort(elements.begin(), elements.end(), [](const Element& a, const Element& b) {
    if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
    if (a.interval.end != b.interval.end) return a.interval.end < b.interval.end;
    return a.id < b.id;
  });

  if (modality == Modality::Text) {
    for (std::size_t i = 1; i < elements.size(); ++i) {
      if (elements[i].interval.start < elements[i - 1].interval.end) {
        throw Error(ErrorCode::OverlappingWords,
                    "words '" + elements[i - 1].id + "' and '" + elements[i].id + "' overlap");
      }
    }
  }

  ElementStream s;
  s.modality_ = modality;
  s.session_id_ = std::move(session);
  s.speaker_id_ = std::move(speaker);
  s.elements_ = std::move(elements);
  return s;
}

Cardinality observed_cardinality(std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  if (pairs.empty()) return Cardinality::ManyToMany;
  std::unordered_map<std::size_t, std::size_t> per_source;
  std::unordered_map<std::size_t, std::size_t> per_target;
  bool source_fans_out = false;
  bool target_fans_in = false;
  for (const auto& [i, j] : pairs) {
    source_fans_out |= ++per_source[i] > 1;
    target_fans_in |= ++per_target[j] > 1;
  }
  if (source_fans_out && target_fans_in) return Cardinality::ManyToMany;
  if (source_fans_out) return Cardinality::OneToMany;
  if (target_fans_in) return Cardinality::ManyToOne;
  return Cardinality::OneToOne;
}

namespace {

struct Event {
  double start;
  int side;  // 0 = source, 1 = target
  std::size_t index;
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> join_elements(std::span<const Element> source,
                                                               std::span<const Element> target,
                                                               double min_overlap) {
  if (!(min_overlap >= 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "min_overlap must be non-negative");
  }
  std::vector<Event> events;
  events.reserve(source.size() + target.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i].interval.duration() > 0.0) events.push_back({source[i].interval.start, 0, i});
  }
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (target[j].interval.duration() > 0.0) events.push_back({target[j].interval.start, 1, j});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.side != b.side) return a.side < b.side;
    return a.index < b.index;
  });

  // Intervals that have started and may still be open, per side.
  std::vector<std::size_t> active[2];
  const std::span<const Element> streams[2] = {source, target};
  std::vector<std::pair<std::size_t, std::size_t>> out;

  for (const auto& ev : events) {
    const int other = 1 - ev.side;
    auto& open = active[other];
    const auto& mine = streams[ev.side][ev.index].interval;
    for (std::size_t k = 0; k < open.size();) {
      const auto& theirs = streams[other][open[k]].interval;
      if (theirs.end <= ev.start) {
        open[k] = open.back();
        open.pop_back();
        continue;
      }
      if (overlap(mine, theirs) > min_overlap) {
        out.emplace_back(ev.side == 0 ? ev.index : open[k], ev.side == 0 ? open[k] : ev.index);
      }
      ++k;
    }
    active[ev.side].push_back(ev.index);
  }
  std::sort(out.begin(), out.end());
  return out;
}

AlignmentMap join_streams(const ElementStream& source, const ElementStream& target,
                          double min_overlap) {
  if (source.session_id() != target.session_id()) {
    throw Error(ErrorCode::SessionMismatch, "cannot join session '" + source.session_id() +
                                                "' with session '" + target.session_id() + "'");
  }
  const auto idx = join_elements(source.elements(), target.elements(), min_overlap);
  AlignmentMap map;
  map.pairs.reserve(idx.size());
  for (const auto& [i, j] : idx) {
    map.pairs.push_back({source[i].id, target[j].id, overlap(source[i].interval, target[j].interval)});
  }
  map.cardinality = observed_cardinality(idx);
  return map;
}

std::vector<QueryHit> query_crossmodal(std::span<const ElementStream> corpus, Modality select,
                                       const SegmentPredicate& where) {
  const bool has_select = std::any_of(corpus.begin(), corpus.end(),
                                      [&](const ElementStream& s) { return s.modality() == select; });
  const bool has_where = std::any_of(corpus.begin(), corpus.end(), [&](const ElementStream& s) {
    return s.modality() == where.modality;
  });
  if (!has_select || !has_where) {
    throw Error(ErrorCode::ModalityAbsent,
                "corpus lacks a " +
                    std::string(to_string(has_select ? where.modality : select)) + " stream");
  }

  std::vector<QueryHit> hits;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const auto& sel = corpus[si];
    if (sel.modality() != select) continue;
    std::set<std::size_t> matched;
    for (const auto& cond : corpus) {
      if (cond.modality() != where.modality || cond.session_id() != sel.session_id()) continue;
      std::vector<Element> satisfied;
      for (const auto& e : cond.elements()) {
        if (where.matches(cond, e)) satisfied.push_back(e);
      }
      for (const auto& [i, j] : join_elements(sel.elements(), satisfied)) matched.insert(i);
    }
    for (std::size_t i : matched) hits.push_back({sel.session_id(), sel[i]});
  }
  std::sort(hits.begin(), hits.end(), [](const QueryHit& a, const QueryHit& b) {
    if (a.session_id != b.session_id) return a.session_id < b.session_id;
    if (a.element.interval.start != b.element.interval.start)
      return a.element.interval.start < b.element.interval.start;
    if (a.element.interval.end != b.element.interval.end)
      return a.element.interval.end < b.element.interval.end;
    return a.element.id < b.element.id;
  });
  return hits;
}

namespace {

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

template <typename T>
bool compare(const T& lhs, CompareOp op, const T& rhs) {
  switch (op) {
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

SegmentPredicate parse_predicate(std::string_view expression) {
  const std::string expr(expression);
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::InvalidQuery, "'" + expr + "': " + why);
  };

  static constexpr std::pair<std::string_view, CompareOp> kOps[] = {
      {"==", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<=", CompareOp::Le},
      {">=", CompareOp::Ge}, {"<", CompareOp::Lt},  {">", CompareOp::Gt},
  };
  std::size_t op_pos = std::string_view::npos;
  std::string_view op_text;
  CompareOp op = CompareOp::Eq;
  for (const auto& [text, kind] : kOps) {
    const auto pos = expression.find(text);
    if (pos != std::string_view::npos && pos < op_pos) {
      op_pos = pos;
      op_text = text;
      op = kind;
    }
  }
  if (op_pos == std::string_view::npos) throw fail("missing comparison operator");

  const auto lhs = trim(expression.substr(0, op_pos));
  const auto rhs = trim(expression.substr(op_pos + op_text.size()));
  const auto dot = lhs.find('.');
  if (dot == std::string_view::npos) throw fail("expected <stream>.<field>");
  const auto modality = parse_modality(lhs.substr(0, dot));
  if (!modality) throw fail("unknown stream '" + std::string(lhs.substr(0, dot)) + "'");
  const std::string field(lhs.substr(dot + 1));
  const std::string value(rhs);
  if (value.empty()) throw fail("missing value");

  SegmentPredicate pred;
  pred.modality = *modality;
  if (field == "word" || field == "label") {
    const bool want_word = field == "word";
    pred.matches = [want_word, op, value](const ElementStream&, const Element& e) {
      if (want_word) {
        const auto* w = std::get_if<Word>(&e.payload);
        return w != nullptr && compare(w->text, op, value);
      }
      const auto* l = std::get_if<Label>(&e.payload);
      return l != nullptr && compare(l->value, op, value);
    };
    return pred;
  }
  if (field == "value" || field == "yaw" || field == "pitch") {
    double number = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), number);
    if (ec != std::errc() || ptr != value.data() + value.size()) throw fail("value is not a number");
    pred.matches = [field, op, number](const ElementStream&, const Element& e) {
      if (field == "value") {
        const auto* v = std::get_if<double>(&e.payload);
        return v != nullptr && compare(*v, op, number);
      }
      const auto* a = std::get_if<AnglePair>(&e.payload);
      if (a == nullptr) return false;
      return compare(field == "yaw" ? a->yaw_deg : a->pitch_deg, op, number);
    };
    return pred;
  }
  throw fail("unknown field '" + field + "'");
}

}  // namespace mmalign::timeline
