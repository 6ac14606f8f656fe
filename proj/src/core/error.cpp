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

#include "curvsig/error.hpp"

namespace curvsig {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Decode: return "decode error";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::TooShort: return "sequence too short";
    case ErrorCode::Degenerate: return "degenerate curve";
    case ErrorCode::Format: return "format error";
    case ErrorCode::Internal: return "internal error";
    }
    return "unknown error";
}

} // namespace curvsig
