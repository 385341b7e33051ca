// Copyright 2026 The Dynasplat Authors
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

#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace dsplat {

enum class ErrorKind {
  InvalidParameter,
  DegenerateCovariance,
  DegenerateGeometry,
  Layout,
  Binding,
  IncompleteGrid,
  Io,
  Service,
  Refusal,
  Config,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

namespace detail {
[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg,
                              const char* expr, const char* file, int line) {
  std::ostringstream os;
  os << msg << " (" << expr << " at " << file << ":" << line << ")";
  throw Error(kind, os.str());
}
}  // namespace detail

}  // namespace dsplat

#define DS_CHECK(cond, kind, msg)                                        \
  do {                                                                   \
    if (!(cond)) {                                                       \
      ::dsplat::detail::fail(::dsplat::ErrorKind::kind, (msg), #cond,    \
                             __FILE__, __LINE__);                        \
    }                                                                    \
  } while (false)
