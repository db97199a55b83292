// Copyright 2026 The bayesnps Authors.
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

#ifndef BAYESNPS_ERRORS_HPP
#define BAYESNPS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bnps {

/// Invalid parameters or configuration (bad prior, rho outside (0,1), ...).
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (survey files, state files).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sample-size search exceeded its cap without meeting the criterion.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnps

#endif  // BAYESNPS_ERRORS_HPP
