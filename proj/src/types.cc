/* Copyright 2026 The SGN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sgn/types.h"

#include <sstream>

#include "sgn/rng.h"

namespace sgn {

void VideoFeatures::validate(int n, int da, int dm) const {
  if (dim_appearance != da || dim_motion != dm) {
    std::ostringstream msg;
    msg << "video '" << video_id << "': feature dims (" << dim_appearance
        << ", " << dim_motion << ") do not match config (" << da << ", " << dm
        << ")";
    throw DataError(msg.str());
  }
  if (frames.cols() != da + dm) {
    throw DataError("video '" + video_id + "': frame width mismatch");
  }
  if (frames.rows() != n) {
    throw DataError("video '" + video_id + "': expected " + std::to_string(n) +
                    " frames, got " + std::to_string(frames.rows()));
  }
  if (!all_finite(frames)) {
    throw DataError("video '" + video_id + "': non-finite feature value");
  }
}

VideoFeatures concat_features(std::string video_id, const Matrix& appearance,
                              const Matrix& motion) {
  if (appearance.rows() != motion.rows()) {
    throw DataError("appearance and motion frame counts differ");
  }
  VideoFeatures v;
  v.video_id = std::move(video_id);
  v.dim_appearance = static_cast<int>(appearance.cols());
  v.dim_motion = static_cast<int>(motion.cols());
  v.frames.resize(appearance.rows(), appearance.cols() + motion.cols());
  v.frames << appearance, motion;
  return v;
}

Matrix row_softmax(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    out.row(i) = (scores.row(i).array() - mx).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Vector softmax(const Vector& scores) {
  Vector out = (scores.array() - scores.maxCoeff()).exp().matrix();
  return out / out.sum();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

std::string Rng::state() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::set_state(const std::string& state) {
  std::istringstream in(state);
  in >> engine_;
  if (!in) throw DataError("corrupt RNG state");
}

}  // namespace sgn
