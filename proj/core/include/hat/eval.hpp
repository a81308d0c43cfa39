#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "hat/records.hpp"

namespace hat {

struct EvalReport {
  double idf1 = 0.0;
  double mota = 0.0;
  std::size_t idsw = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t idtp = 0;
  std::size_t idfp = 0;
  std::size_t idfn = 0;
  std::size_t num_gt = 0;
  std::size_t num_pred = 0;
  std::size_t matches = 0;
};

/// Intersection over union of two (left, top, width, height) boxes.
double iou(const Box& a, const Box& b);

/// CLEAR-MOT counts from per-frame Hungarian matching on 1 − IoU (pairs below
/// `iou_thr` never match), and IDF1 from a global one-to-one matching of
/// predicted to ground-truth identities maximizing co-detected frames.
/// Throws DuplicateKey if a (frame, id) repeats in either input.
EvalReport evaluate(std::span<const TrackRecord> pred, std::span<const TrackRecord> gt,
                    double iou_thr = 0.5);

/// Aligned human-readable table.
std::string format_report_text(const EvalReport& report);
/// One "key=value" per line.
std::string format_report_kv(const EvalReport& report);

}  // namespace hat
