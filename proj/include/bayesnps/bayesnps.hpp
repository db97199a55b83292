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

#ifndef BAYESNPS_BAYESNPS_HPP
#define BAYESNPS_BAYESNPS_HPP

#include <bayesnps/alc.hpp>
#include <bayesnps/errors.hpp>
#include <bayesnps/hpd.hpp>
#include <bayesnps/ingest.hpp>
#include <bayesnps/model.hpp>
#include <bayesnps/parallel.hpp>
#include <bayesnps/rvgen.hpp>

#endif  // BAYESNPS_BAYESNPS_HPP
