#include "hat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "hat/error.hpp"
#include "hat/rng.hpp"

namespace hat {

namespace {

FeatureVector gaussian_vector(SplitMix64& rng, std::size_t dim, double sigma) {
  FeatureVector v(dim);
  for (double& x : v) x = sigma * rng.normal();
  return v;
}

double round_centi(double v) { return std::round(v * 100.0) / 100.0; }

// Float32 storage is what the feature file carries; keep memory and disk equal.
FeatureVector to_float_precision(const FeatureVector& v) {
  FeatureVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

struct Mover {
  Box box;
  double vx = 0.0;
  double vy = 0.0;
};

void advance(Mover& m, double width, double height) {
  Box& b = m.box;
  b.left += m.vx;
  b.top += m.vy;
  if (b.left < 0.0) {
    b.left = -b.left;
    m.vx = -m.vx;
  }
  if (b.left + b.width > width) {
    b.left = 2.0 * (width - b.width) - b.left;
    m.vx = -m.vx;
  }
  if (b.top < 0.0) {
    b.top = -b.top;
    m.vy = -m.vy;
  }
  if (b.top + b.height > height) {
    b.top = 2.0 * (height - b.height) - b.top;
    m.vy = -m.vy;
  }
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::Config, what); };
  if (num_ids < 2) fail("num_ids must be >= 2");
  if (num_frames < 1) fail("num_frames must be >= 1");
  if (dim < 2) fail("dim must be >= 2");
  if (!(cone_angle_deg > 0.0 && cone_angle_deg <= 90.0)) fail("cone_angle_deg must lie in (0, 90]");
  if (!(drift_step >= 0.0)) fail("drift_step must be >= 0");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(nuisance_gain >= 0.0)) fail("nuisance_gain must be >= 0");
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0)) fail("occlusion_prob must lie in [0, 1]");
  if (occlusion_len.first < 1 || occlusion_len.second < occlusion_len.first) {
    fail("occlusion_len must satisfy 1 <= min <= max");
  }
  if (!(det_conf.first >= 0.0 && det_conf.second <= 1.0 && det_conf.first <= det_conf.second)) {
    fail("det_conf must satisfy 0 <= min <= max <= 1");
  }
  if (!(frame_width > 200.0 && frame_height > 400.0)) fail("frame size too small");
}

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  SplitMix64 rng(config.seed);
  const std::size_t dim = config.dim;
  const double cone = config.cone_angle_deg * std::numbers::pi / 180.0;

  SynthOutput out;
  const FeatureVector axis = normalized(gaussian_vector(rng, dim, 1.0));
  for (std::size_t k = 0; k < config.num_ids; ++k) {
    FeatureVector t = gaussian_vector(rng, dim, 1.0);
    const double along = dot(t, axis);
    for (std::size_t i = 0; i < dim; ++i) t[i] -= along * axis[i];
    t = normalized(t);
    const double angle = cone * std::sqrt(rng.uniform());
    FeatureVector p(dim);
    for (std::size_t i = 0; i < dim; ++i) p[i] = std::cos(angle) * axis[i] + std::sin(angle) * t[i];
    out.prototypes.push_back(normalized(p));
  }

  // Shared nuisance subspace: appearance variation common to every identity
  // (pose, lighting), carrying most of the observation noise.
  std::vector<FeatureVector> nuisance;
  for (std::size_t r = 0; r < std::min(config.nuisance_rank, dim - 1); ++r) {
    FeatureVector b = gaussian_vector(rng, dim, 1.0);
    for (const auto& prev : nuisance) {
      const double c = dot(b, prev);
      for (std::size_t i = 0; i < dim; ++i) b[i] -= c * prev[i];
    }
    nuisance.push_back(normalized(b));
  }

  std::vector<Mover> movers(config.num_ids);
  for (auto& m : movers) {
    m.box.width = round_centi(rng.uniform(40.0, 120.0));
    m.box.height = round_centi(m.box.width * rng.uniform(2.0, 3.0));
    m.box.left = rng.uniform(0.0, config.frame_width - m.box.width);
    m.box.top = rng.uniform(0.0, config.frame_height - m.box.height);
    m.vx = rng.uniform(-6.0, 6.0);
    m.vy = rng.uniform(-6.0, 6.0);
  }

  // Both magnitudes are expected vector norms, independent of dim.
  const double per_component = 1.0 / std::sqrt(static_cast<double>(dim));
  const double drift_sigma = config.drift_step * per_component;
  const double noise_sigma = config.noise_sigma * per_component;
  const double nuisance_sigma =
      nuisance.empty() ? 0.0
                       : config.noise_sigma * config.nuisance_gain /
                             std::sqrt(static_cast<double>(nuisance.size()));
  std::vector<FeatureVector> drift(config.num_ids, FeatureVector(dim, 0.0));
  std::vector<std::size_t> occluded_left(config.num_ids, 0);
  out.features.dim = dim;

  std::vector<std::size_t> visible;
  for (std::size_t frame = 1; frame <= config.num_frames; ++frame) {
    visible.clear();
    for (std::size_t k = 0; k < config.num_ids; ++k) {
      if (frame > 1) {
        for (double& x : drift[k]) x += drift_sigma * rng.normal();
        advance(movers[k], config.frame_width, config.frame_height);
      }
      if (occluded_left[k] > 0) {
        --occluded_left[k];
        continue;
      }
      if (config.occlusion_prob > 0.0 && rng.uniform() < config.occlusion_prob) {
        std::size_t len = config.occlusion_len.first;
        while (len < config.occlusion_len.second && rng.uniform() < 0.5) ++len;
        occluded_left[k] = len - 1;
        continue;
      }
      visible.push_back(k);
    }
    // Detector output order is arbitrary.
    for (std::size_t i = visible.size(); i > 1; --i) {
      std::swap(visible[i - 1], visible[rng.below(i)]);
    }
    for (std::size_t k : visible) {
      const Box& mb = movers[k].box;
      const Box box{round_centi(mb.left), round_centi(mb.top), mb.width, mb.height};
      const auto id = static_cast<std::int64_t>(k + 1);
      const auto frame_index = static_cast<FrameIndex>(frame);
      out.gt.push_back(TrackRecord{frame_index, id, box});

      FeatureVector f = out.prototypes[k];
      const FeatureVector noise = gaussian_vector(rng, dim, noise_sigma);
      for (std::size_t i = 0; i < dim; ++i) f[i] += drift[k][i] + noise[i];
      for (const auto& b : nuisance) {
        const double c = nuisance_sigma * rng.normal();
        for (std::size_t i = 0; i < dim; ++i) f[i] += c * b[i];
      }
      out.features.vectors.push_back(to_float_precision(normalized(f)));

      DetectionRow row;
      row.frame = frame_index;
      row.id = -1;
      row.box = box;
      row.confidence = round_centi(rng.uniform(config.det_conf.first, config.det_conf.second));
      row.source_index = out.detections.rows.size();
      out.detections.rows.push_back(row);
      out.detection_truth.push_back(id);
    }
  }
  std::stable_sort(out.gt.begin(), out.gt.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

SeparationStats separation_stats(const SynthOutput& out) {
  SeparationStats s;
  const auto& rows = out.detections.rows;
  const auto& feats = out.features.vectors;
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  std::map<std::int64_t, std::size_t> last_of_id;
  std::size_t frame_begin = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].frame != rows[frame_begin].frame) frame_begin = i;
    for (std::size_t j = frame_begin; j < i; ++j) {
      inter += cosine(feats[i], feats[j]);
      ++n_inter;
    }
    const auto id = out.detection_truth[i];
    if (const auto it = last_of_id.find(id); it != last_of_id.end()) {
      intra += cosine(feats[i], feats[it->second]);
      ++n_intra;
    }
    last_of_id[id] = i;
  }
  s.mean_intra = n_intra ? intra / static_cast<double>(n_intra) : 0.0;
  s.mean_inter = n_inter ? inter / static_cast<double>(n_inter) : 0.0;
  for (std::size_t a = 0; a < out.prototypes.size(); ++a)
    for (std::size_t b = a + 1; b < out.prototypes.size(); ++b)
      s.min_prototype_cosine =
          std::min(s.min_prototype_cosine, cosine(out.prototypes[a], out.prototypes[b]));
  return s;
}

}  // namespace hat
