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

#ifndef SGN_OPTIMIZER_H_
#define SGN_OPTIMIZER_H_

#include "sgn/config.h"
#include "sgn/model.h"

namespace sgn {

// Adam with bias correction.
class Adam {
 public:
  Adam(const Config& config, const ModelParams& like);

  void update(ModelParams& params, const ModelParams& grads);

  long steps() const { return steps_; }
  const ModelParams& first_moment() const { return m_; }
  const ModelParams& second_moment() const { return v_; }
  void restore(long steps, ModelParams m, ModelParams v);

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long steps_ = 0;
  ModelParams m_;
  ModelParams v_;
};

// Rescales grads so their global L2 norm is at most max_norm (0 disables).
// Returns the norm before clipping.
double clip_global_norm(ModelParams& grads, double max_norm);

}  // namespace sgn

#endif  // SGN_OPTIMIZER_H_
