// Copyright 2026 The UTI Authors.
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

#include "uti/error.hpp"

namespace uti {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "IoError";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Overlap: return "OverlapError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::TooFewUtterances: return "TooFewUtterances";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::UnknownSpeaker: return "UnknownSpeaker";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::FrameTooSmall: return "FrameTooSmall";
    case ErrorCode::NoFrames: return "NoFrames";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Shape: return "ShapeError";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyEval: return "EmptyEval";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::SpeakerSetMismatch: return "SpeakerSetMismatch";
    case ErrorCode::InvalidCombination: return "InvalidCombination";
    case ErrorCode::MissingPrerequisite: return "MissingPrerequisite";
    case ErrorCode::Leakage: return "LeakageError";
  }
  return "Error";
}

}  // namespace uti
