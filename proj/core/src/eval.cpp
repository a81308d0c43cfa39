#include "hat/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hat/assignment.hpp"
#include "hat/error.hpp"
#include "hat/io.hpp"

namespace hat {

namespace {

struct FrameView {
  std::vector<const TrackRecord*> gt;
  std::vector<const TrackRecord*> pred;
};

void check_unique(std::span<const TrackRecord> records, const char* which) {
  std::set<std::pair<FrameIndex, std::int64_t>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.frame, r.id).second) {
      throw Error(ErrorCode::DuplicateKey, std::string(which) + " repeats (frame " +
                                               std::to_string(r.frame) + ", id " +
                                               std::to_string(r.id) + ")");
    }
  }
}

// Dense index for arbitrary ids, in increasing id order.
std::map<std::int64_t, std::size_t> index_ids(std::span<const TrackRecord> records) {
  std::map<std::int64_t, std::size_t> ids;
  for (const auto& r : records) ids.emplace(r.id, 0);
  std::size_t next = 0;
  for (auto& [id, slot] : ids) slot = next++;
  return ids;
}

}  // namespace

double iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.left + a.width, b.left + b.width) -
                                      std::max(a.left, b.left));
  const double iy = std::max(0.0, std::min(a.top + a.height, b.top + b.height) -
                                      std::max(a.top, b.top));
  const double inter = ix * iy;
  const double uni = a.width * a.height + b.width * b.height - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

EvalReport evaluate(std::span<const TrackRecord> pred, std::span<const TrackRecord> gt,
                    double iou_thr) {
  if (!(iou_thr > 0.0 && iou_thr < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "iou threshold must lie in (0, 1)");
  }
  check_unique(pred, "prediction");
  check_unique(gt, "ground truth");

  std::map<FrameIndex, FrameView> frames;
  for (const auto& r : gt) frames[r.frame].gt.push_back(&r);
  for (const auto& r : pred) frames[r.frame].pred.push_back(&r);

  const auto gt_ids = index_ids(gt);
  const auto pred_ids = index_ids(pred);
  Matrix overlap(gt_ids.size(), pred_ids.size());

  EvalReport rep;
  rep.num_gt = gt.size();
  rep.num_pred = pred.size();
  std::map<std::int64_t, std::int64_t> last_match;  // gt id -> pred id

  for (const auto& [frame, view] : frames) {
    const std::size_t m = view.gt.size();
    const std::size_t n = view.pred.size();
    Matrix overlaps(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        overlaps(i, j) = iou(view.gt[i]->box, view.pred[j]->box);
        if (overlaps(i, j) >= iou_thr) {
          overlap(gt_ids.at(view.gt[i]->id), pred_ids.at(view.pred[j]->id)) += 1.0;
        }
      }

    std::size_t matched = 0;
    if (m > 0 && n > 0) {
      // Gated pairs cost more than any set of valid pairs can save, so the
      // number of valid matches is maximized first.
      const double gated = static_cast<double>(std::min(m, n)) + 1.0;
      CostMatrix cost(m, n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
          cost(i, j) = overlaps(i, j) >= iou_thr ? 1.0 - overlaps(i, j) : gated;
      for (const auto& [i, j] : solve_assignment(cost).pairs) {
        if (overlaps(i, j) < iou_thr) continue;
        ++matched;
        const auto g = view.gt[i]->id;
        const auto p = view.pred[j]->id;
        const auto it = last_match.find(g);
        if (it != last_match.end() && it->second != p) ++rep.idsw;
        last_match[g] = p;
      }
    }
    rep.matches += matched;
    rep.fn += m - matched;
    rep.fp += n - matched;
  }

  if (!gt_ids.empty() && !pred_ids.empty()) {
    CostMatrix cost(overlap.rows(), overlap.cols());
    for (std::size_t i = 0; i < cost.entries().size(); ++i) cost.data()[i] = -overlap.data()[i];
    double idtp = 0.0;
    for (const auto& [i, j] : solve_assignment(cost).pairs) idtp += overlap(i, j);
    rep.idtp = static_cast<std::size_t>(idtp);
  }
  rep.idfn = rep.num_gt - rep.idtp;
  rep.idfp = rep.num_pred - rep.idtp;
  const std::size_t denom = 2 * rep.idtp + rep.idfp + rep.idfn;
  rep.idf1 = denom > 0 ? 2.0 * static_cast<double>(rep.idtp) / static_cast<double>(denom) : 0.0;
  rep.mota = rep.num_gt > 0 ? 1.0 - static_cast<double>(rep.fn + rep.fp + rep.idsw) /
                                        static_cast<double>(rep.num_gt)
                            : 0.0;
  return rep;
}

std::string format_report_text(const EvalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%-8s %-8s %-6s %-8s %-8s %-8s %-8s %-8s %-8s\n"
                "%-8.4f %-8.4f %-6zu %-8zu %-8zu %-8zu %-8zu %-8zu %-8zu\n",
                "IDF1", "MOTA", "IDSW", "FP", "FN", "IDTP", "IDFP", "IDFN", "GT", r.idf1, r.mota,
                r.idsw, r.fp, r.fn, r.idtp, r.idfp, r.idfn, r.num_gt);
  return buf;
}

namespace {

// Reals always carry a decimal point so they read as reals ("1.0", not "1").
std::string real_text(double v) {
  std::string s = format_number(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string format_report_kv(const EvalReport& r) {
  std::string out;
  out += "idf1=" + real_text(r.idf1) + '\n';
  out += "mota=" + real_text(r.mota) + '\n';
  out += "idsw=" + std::to_string(r.idsw) + '\n';
  out += "fp=" + std::to_string(r.fp) + '\n';
  out += "fn=" + std::to_string(r.fn) + '\n';
  out += "idtp=" + std::to_string(r.idtp) + '\n';
  out += "idfp=" + std::to_string(r.idfp) + '\n';
  out += "idfn=" + std::to_string(r.idfn) + '\n';
  out += "num_gt=" + std::to_string(r.num_gt) + '\n';
  out += "num_pred=" + std::to_string(r.num_pred) + '\n';
  return out;
}

}  // namespace hat
