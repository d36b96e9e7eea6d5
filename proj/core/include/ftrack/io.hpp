// Copyright 2026 the ftrack authors
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

#ifndef FTRACK_IO_HPP
#define FTRACK_IO_HPP

#include <string>
#include <vector>

#include "ftrack/excitation.hpp"
#include "ftrack/metrics.hpp"
#include "ftrack/tracker.hpp"
#include "ftrack/waveform.hpp"

namespace ftrack {

/// Linear-PCM WAV, 16-bit or float32. Multichannel files keep the first
/// channel only (a note goes to stderr). Samples land in [-1, 1].
Waveform load_waveform(const std::string& path);

/// 16-bit PCM writer (atomic: temp file + rename).
void save_waveform(const std::string& path, const Waveform& w);

/// Track CSV with the fixed header
/// time_s,f1_hz,b1_hz,f2_hz,b2_hz,f3_hz,b3_hz,f4_hz,b4_hz.
/// Missing formants stay empty both ways.
void write_track_csv(const std::string& path, const FormantTrack& track);
FormantTrack read_track_csv(const std::string& path);

/// GCI file: one ascending time in seconds per line. The reader converts to
/// the nearest sample at fs and rejects non-ascending or out-of-range input.
GciSequence read_gci_file(const std::string& path, int sample_rate_hz);
void write_gci_file(const std::string& path, const std::vector<double>& times_s);

/// Label TSV: start_s<TAB>end_s<TAB>category per line.
std::vector<LabelSpan> read_label_file(const std::string& path);

}  // namespace ftrack

#endif  // FTRACK_IO_HPP
