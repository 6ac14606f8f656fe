// Copyright 2026 The Curvsig Authors
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

#ifndef CURVSIG_ERROR_HPP
#define CURVSIG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace curvsig {

/// Failure categories. The numeric values are mirrored by cs_status in the C API.
enum class ErrorCode {
    InvalidArgument = 1,
    Io = 2,
    Decode = 3,
    DimensionMismatch = 4,
    TooShort = 5,
    Degenerate = 6,
    Format = 7,
    Internal = 8,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace curvsig

#endif // CURVSIG_ERROR_HPP
