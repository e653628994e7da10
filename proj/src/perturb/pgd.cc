//
// Copyright 2026 The Cleanmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <algorithm>
#include <cmath>
#include <string>

#include "cleanmark/errors.h"
#include "cleanmark/perturb.h"

namespace cleanmark {

PgdBudget DefaultPgdBudget(Modality modality) {
  switch (modality) {
    case Modality::kImage:
      return {8.0 / 255.0, 2.0 / 255.0, 10};
    case Modality::kAudio:
      return {0.02, 0.005, 20};
    case Modality::kText:
      break;
  }
  throw UnsupportedModalityError("PGD budgets apply to continuous modalities only");
}

void ValidatePgdBudget(const PgdBudget& budget) {
  if (!(budget.epsilon >= 0.0)) throw InvalidArgumentError("epsilon must be >= 0");
  if (!(budget.step_length > 0.0)) throw InvalidArgumentError("step_length must be > 0");
  if (budget.iterations == 0) throw InvalidArgumentError("iterations must be >= 1");
}

float ProjectToFloat(double target, float center, double epsilon, Domain domain) {
  float out = static_cast<float>(target);
  const double c = static_cast<double>(center);
  // Rounding may step just outside the ball or the domain; walk back.
  while (static_cast<double>(out) - c > epsilon || out > domain.hi) {
    out = std::nextafter(out, center);
  }
  while (c - static_cast<double>(out) > epsilon || out < domain.lo) {
    out = std::nextafter(out, center);
  }
  return out;
}

std::vector<float> PgdPerturb(const Model& model, std::span<const float> x,
                              uint32_t label, const PgdBudget& budget,
                              Modality modality) {
  if (!IsContinuous(modality) || TakesTokens(model.arch())) {
    throw UnsupportedModalityError("PGD needs a continuous modality; text uses TextPerturb");
  }
  ValidatePgdBudget(budget);
  const Domain domain = DomainOf(modality);
  for (float v : x) {
    if (!(v >= domain.lo && v <= domain.hi)) {
      throw InvalidArgumentError("PGD input lies outside the modality domain");
    }
  }
  std::vector<float> current(x.begin(), x.end());
  if (budget.epsilon == 0.0) return current;
  for (size_t t = 0; t < budget.iterations; ++t) {
    const std::vector<double> grad = InputGradient(model, {current, {}}, label);
    for (size_t i = 0; i < current.size(); ++i) {
      const double g = grad[i];
      if (std::isnan(g)) {
        throw NumericError("NaN input gradient at iteration " + std::to_string(t) +
                           ", coordinate " + std::to_string(i));
      }
      const double sign = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
      const double origin = static_cast<double>(x[i]);
      double next = static_cast<double>(current[i]) + budget.step_length * sign;
      next = std::clamp(next, origin - budget.epsilon, origin + budget.epsilon);
      next = std::clamp(next, static_cast<double>(domain.lo), static_cast<double>(domain.hi));
      current[i] = ProjectToFloat(next, x[i], budget.epsilon, domain);
    }
  }
  return current;
}

}  // namespace cleanmark
