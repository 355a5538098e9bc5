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

#ifndef SGN_TYPES_H_
#define SGN_TYPES_H_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace sgn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using TokenId = int;

// Malformed or inconsistent input data (files, corpora, vocabularies).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced or consumed by the numerics.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or command-line usage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frame representations of one video. Each row is the concatenation of an
// appearance vector (first dim_appearance columns) and a motion vector.
struct VideoFeatures {
  std::string video_id;
  Matrix frames;
  int dim_appearance = 0;
  int dim_motion = 0;

  int n_frames() const { return static_cast<int>(frames.rows()); }
  int dim() const { return dim_appearance + dim_motion; }

  // Throws DataError unless rows == n_frames, widths match, entries finite.
  void validate(int n_frames, int dim_appearance, int dim_motion) const;
};

// Concatenates per-frame appearance and motion features.
VideoFeatures concat_features(std::string video_id, const Matrix& appearance,
                              const Matrix& motion);

// A caption as token ids, without SOS/EOS markers.
struct Caption {
  std::vector<TokenId> tokens;

  int length() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Caption&) const = default;
};

// Row-wise softmax, numerically stabilized by the row maximum.
Matrix row_softmax(const Matrix& scores);
Vector softmax(const Vector& scores);

bool all_finite(const Matrix& m);

}  // namespace sgn

#endif  // SGN_TYPES_H_
