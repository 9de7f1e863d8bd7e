// Copyright 2026 The semcausal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthetic.hpp"

#include "semcausal/random.hpp"
#include "semcausal/sem_fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace semcausal::synthetic {

std::string youth_model_syntax() {
  return R"(# first-order factors
AfC =~ afc1 + afc2 + afc3
Aut =~ aut1 + aut2 + aut3
Hum =~ hum1 + hum2 + hum3
Dis =~ dis1 + dis2 + dis3
Pee =~ pee1 + pee2 + pee3
Pro =~ pro1 + pro2 + pro3
Bel =~ bel1 + bel2 + bel3
Sup =~ sup1 + sup2 + sup3
Rul =~ rul1 + rul2 + rul3
Val =~ val1 + val2 + val3
Opt =~ opt1 + opt2 + opt3
Pes =~ pes1 + pes2 + pes3
GSe =~ gse1 + gse2 + gse3
Age =~ age1 + age2 + age3
Com =~ com1 + com2 + com3
Man =~ man1 + man2 + man3
Mea =~ mea1 + mea2 + mea3
# higher-order factors
Bon =~ Bel + Sup
Cla =~ Rul + Val
PP =~ AfC + Aut + Hum + Dis
CFS =~ Pee + Bon + Pro + Cla
PYD =~ Opt + Pes + GSe + Age + Com + Man + Mea
# structure
PYD ~ PP + CFS
)";
}

Vector generating_parameters(const SemModel& model, std::uint64_t seed) {
  Rng rng(seed);
  Vector params(model.parameter_count());
  for (Index k = 0; k < model.parameter_count(); ++k) {
    const auto& pos = model.parameter_positions()[static_cast<std::size_t>(k)].front();
    if (pos.matrix == RamMatrix::A) {
      params(k) = 0.6 + 0.3 * rng.uniform01();
    } else if (pos.row != pos.col) {
      params(k) = 0.3;
    } else {
      params(k) = pos.row < model.observed_count() ? 0.5 : 0.6;
    }
  }
  return params;
}

ObservedDataset youth_dataset(const OrdinalOptions& options) {
  const SemModel model = parse_model_spec(youth_model_syntax());
  const ObservedDataset raw = simulate(model, generating_parameters(model, options.seed), options.rows, options.seed + 1);
  Matrix values = raw.values();
  for (Index c = 0; c < values.cols(); ++c) {
    const double mean = values.col(c).mean();
    const double sd = std::sqrt((values.col(c).array() - mean).square().sum() / static_cast<double>(values.rows() - 1));
    for (Index r = 0; r < values.rows(); ++r) {
      const double z = (values(r, c) - mean) / sd;
      int level = 1;
      for (int t = 1; t < options.levels; ++t)
        if (z > -1.5 + 3.0 * (t - 1) / std::max(1, options.levels - 2)) ++level;
      values(r, c) = level;
    }
  }

  Rng rng(options.seed + 2);
  std::vector<Index> order(static_cast<std::size_t>(values.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  for (Index i = 0; i < std::min(options.incomplete_rows, values.rows()); ++i) {
    const Index r = order[static_cast<std::size_t>(i)];
    const auto cells = 1 + rng.uniform_index(3);
    for (std::uint64_t j = 0; j < cells; ++j) values(r, static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(values.cols())))) = kMissing;
  }

  std::vector<VariableSchema> schema;
  for (const auto& name : model.observed()) schema.push_back({name, VariableKind::ordinal, options.levels, 1, {"", "NA"}});
  std::vector<std::string> ids;
  for (Index r = 0; r < values.rows(); ++r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "c%04lld", static_cast<long long>(r + 1));
    ids.emplace_back(buf);
  }
  return ObservedDataset(std::move(schema), std::move(values), std::move(ids));
}

}  // namespace semcausal::synthetic
