#include "mmalign/gaze.hpp"

#include <algorithm>
#include <cmath>

#include "mmalign/error.hpp"

namespace mmalign::gaze {

std::optional<double> median_sample_period(std::span<const GazeSample> samples) {
  if (samples.size() < 2) return std::nullopt;
  std::vector<double> gaps;
  gaps.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) gaps.push_back(samples[i].t - samples[i - 1].t);
  const auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid;
}

std::vector<AddressSegment> detect_address_segments(std::span<const GazeSample> samples,
                                                    const AddressRule& rule,
                                                    std::optional<double> sample_period) {
  if (!(rule.yaw_min < rule.yaw_max)) {
    throw Error(ErrorCode::InvalidParameters, "address rule needs yaw_min < yaw_max");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw Error(ErrorCode::UnsortedSamples,
                  "gaze sample " + std::to_string(i) + " is not after its predecessor");
    }
  }
  if (!sample_period) sample_period = median_sample_period(samples);
  if (!sample_period) return {};
  if (!(*sample_period > 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "sample period must be positive");
  }

  std::vector<AddressSegment> out;
  bool open = false;
  double first_t = 0.0;
  double last_kept_t = 0.0;
  auto close = [&] {
    if (open) {
      out.push_back({{first_t, last_kept_t + *sample_period, false}, rule.label, 0});
      open = false;
    }
  };

  for (const auto& s : samples) {
    if (!s.frontal) {
      close();
      continue;
    }
    const bool addressing = s.yaw_deg >= rule.yaw_min && s.yaw_deg <= rule.yaw_max;
    if (addressing) {
      if (!open) {
        open = true;
        first_t = s.t;
      }
      last_kept_t = s.t;
    } else if (open && s.pitch_deg < rule.notes_pitch_threshold) {
      last_kept_t = s.t;
    } else {
      close();
    }
  }
  close();
  return out;
}

timeline::ElementStream to_stream(std::span<const AddressSegment> segments, std::string session,
                                  std::optional<std::string> speaker) {
  std::vector<timeline::Element> elements;
  elements.reserve(segments.size());
  for (std::size_t k = 0; k < segments.size(); ++k) {
    elements.push_back({"seg" + std::to_string(k), segments[k].interval,
                        timeline::Label{segments[k].label}});
  }
  return timeline::build_stream(timeline::Modality::Derived, std::move(session), std::move(speaker),
                                std::move(elements));
}

std::vector<AddressSegment> enforce_min_words(std::span<const AddressSegment> segments,
                                              const std::string& segments_session,
                                              const timeline::ElementStream& words,
                                              const AddressRule& rule) {
  if (segments_session != words.session_id()) {
    throw Error(ErrorCode::SessionMismatch, "segments of session '" + segments_session +
                                                "' cannot be matched to words of session '" +
                                                words.session_id() + "'");
  }
  if (rule.min_words < 1) {
    throw Error(ErrorCode::InvalidParameters, "min_words must be at least 1");
  }
  if (segments.empty()) return {};

  // The join wants segments ordered by start; order[k] maps back to the input.
  std::vector<std::size_t> order(segments.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segments[a].interval.start < segments[b].interval.start;
  });
  std::vector<timeline::Element> seg_elements;
  seg_elements.reserve(segments.size());
  for (std::size_t k : order) {
    seg_elements.push_back({"seg" + std::to_string(k), segments[k].interval,
                            timeline::Label{segments[k].label}});
  }
  std::vector<std::size_t> counts(segments.size(), 0);
  for (const auto& [k, w] : timeline::join_elements(seg_elements, words.elements())) ++counts[order[k]];

  std::vector<AddressSegment> kept;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (counts[k] >= rule.min_words) {
      AddressSegment s = segments[k];
      s.word_count = counts[k];
      kept.push_back(std::move(s));
    }
  }
  return kept;
}

}  // namespace mmalign::gaze
