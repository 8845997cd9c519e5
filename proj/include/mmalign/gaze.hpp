#pragma once

// Head-pose traces to address segments: yaw-band runs over frontal samples,
// kept open through downward "reading notes" glances, then filtered by the
// number of words spoken inside them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmalign/timeline.hpp"

namespace mmalign::gaze {

struct GazeSample {
  double t = 0.0;          // seconds
  double yaw_deg = 0.0;    // left/right, [-180, 180]
  double pitch_deg = 0.0;  // up/down, [-90, 90]
  bool frontal = true;     // speaker filmed from the front

  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct AddressRule {
  double yaw_min = 45.0;
  double yaw_max = 70.0;
  // While a segment is open, samples with pitch below this keep it open.
  // Use -infinity to disable the correction.
  double notes_pitch_threshold = -20.0;
  std::size_t min_words = 10;
  std::string label = "AfD";
};

struct AddressSegment {
  timeline::TimeInterval interval;
  std::string label;
  std::size_t word_count = 0;

  friend bool operator==(const AddressSegment&, const AddressSegment&) = default;
};

/// Median spacing between consecutive timestamps; nullopt with < 2 samples.
std::optional<double> median_sample_period(std::span<const GazeSample> samples);

/// Maximal runs of addressing samples. A run ends one sample period after its
/// last kept sample. Non-frontal samples close any open run. When
/// `sample_period` is absent it is the median timestamp spacing (a lone
/// sample yields no segment). Throws UnsortedSamples unless timestamps
/// strictly increase.
std::vector<AddressSegment> detect_address_segments(std::span<const GazeSample> samples,
                                                    const AddressRule& rule,
                                                    std::optional<double> sample_period = {});

/// Counts words overlapping each segment and drops segments below
/// rule.min_words. Throws SessionMismatch when `segments_session` differs
/// from the word stream's session.
std::vector<AddressSegment> enforce_min_words(std::span<const AddressSegment> segments,
                                              const std::string& segments_session,
                                              const timeline::ElementStream& words,
                                              const AddressRule& rule);

/// Segments as a Derived stream with Label payloads; ids are "seg<k>".
timeline::ElementStream to_stream(std::span<const AddressSegment> segments, std::string session,
                                  std::optional<std::string> speaker);

}  // namespace mmalign::gaze
