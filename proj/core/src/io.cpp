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

#include "ftrack/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace ftrack {
namespace {

struct AtomicWriter {
  explicit AtomicWriter(const std::string& path)
      : final_path(path), temp_path(path + ".tmp"), out(temp_path, std::ios::binary) {
    if (!out) throw Error("cannot open for writing: " + temp_path);
  }
  void commit() {
    out.flush();
    if (!out) throw Error("write failed: " + temp_path);
    out.close();
    std::filesystem::rename(temp_path, final_path);
    committed = true;
  }
  ~AtomicWriter() {
    if (!committed) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(temp_path, ec);
    }
  }
  std::string final_path, temp_path;
  std::ofstream out;
  bool committed = false;
};

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::ostream& os, uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put_u16(std::ostream& os, uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Waveform load_waveform(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_offset = 0, data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    if (std::memcmp(id, "fmt ", 4) == 0 && pos + 8 + 16 <= bytes.size()) {
      format = read_u16(bytes.data() + pos + 8);
      channels = read_u16(bytes.data() + pos + 10);
      rate = read_u32(bytes.data() + pos + 12);
      bits = read_u16(bytes.data() + pos + 22);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_offset = pos + 8;
      data_size = std::min<size_t>(chunk_size, bytes.size() - data_offset);
    }
    pos += 8 + chunk_size + (chunk_size & 1);
  }
  if (rate == 0 || channels == 0) throw Error("WAV missing fmt chunk: " + path);
  if (data_offset == 0 || data_size == 0) throw Error("WAV has no audio data: " + path);
  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32)
    throw Error("unsupported WAV encoding (want PCM16 or float32): " + path);
  if (channels > 1)
    std::cerr << "ftrack: " << path << " has " << channels
              << " channels; keeping the first\n";

  const size_t bytes_per_sample = bits / 8;
  const size_t stride = bytes_per_sample * channels;
  const size_t frames = data_size / stride;
  if (frames == 0) throw Error("WAV has zero-length audio: " + path);

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.samples.resize(frames);
  const unsigned char* data = bytes.data() + data_offset;
  for (size_t i = 0; i < frames; ++i) {
    const unsigned char* p = data + i * stride;
    if (pcm16) {
      const int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
      w.samples[i] = static_cast<double>(v) / 32768.0;
    } else {
      float f;
      std::memcpy(&f, p, 4);
      w.samples[i] = static_cast<double>(f);
    }
  }
  validate(w);
  return w;
}

void save_waveform(const std::string& path, const Waveform& w) {
  validate(w);
  AtomicWriter writer(path);
  std::ostream& os = writer.out;
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  os.write("RIFF", 4);
  put_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put_u32(os, 16);
  put_u16(os, 1);  // PCM
  put_u16(os, 1);  // mono
  put_u32(os, static_cast<uint32_t>(w.sample_rate_hz));
  put_u32(os, static_cast<uint32_t>(w.sample_rate_hz) * 2);
  put_u16(os, 2);
  put_u16(os, 16);
  os.write("data", 4);
  put_u32(os, data_bytes);
  for (double s : w.samples) {
    const long quantized = std::lround(std::clamp(s, -1.0, 1.0) * 32768.0);
    const int16_t v = static_cast<int16_t>(std::clamp<long>(quantized, -32768, 32767));
    put_u16(os, static_cast<uint16_t>(v));
  }
  writer.commit();
}

void write_track_csv(const std::string& path, const FormantTrack& track) {
  AtomicWriter writer(path);
  std::ostream& os = writer.out;
  os << "time_s,f1_hz,b1_hz,f2_hz,b2_hz,f3_hz,b3_hz,f4_hz,b4_hz\n";
  os << std::fixed;
  for (const FormantFrame& frame : track.frames) {
    os << std::setprecision(6) << frame.time_s;
    for (size_t i = 0; i < 4; ++i) {
      if (i < frame.formants.size() && frame.formants[i]) {
        os << ',' << std::setprecision(3) << frame.formants[i]->frequency_hz << ','
           << frame.formants[i]->bandwidth_hz;
      } else {
        os << ",,";
      }
    }
    os << '\n';
  }
  writer.commit();
}

FormantTrack read_track_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open track CSV: " + path);
  FormantTrack track;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty track CSV: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.empty()) continue;
    FormantFrame frame;
    frame.time_s = std::stod(fields[0]);
    for (size_t i = 0; i < 4; ++i) {
      const size_t fi = 1 + 2 * i, bi = 2 + 2 * i;
      if (bi < fields.size() && !fields[fi].empty() && !fields[bi].empty()) {
        frame.formants.emplace_back(
            FormantEstimate{std::stod(fields[fi]), std::stod(fields[bi])});
      } else {
        frame.formants.emplace_back(std::nullopt);
      }
    }
    while (!frame.formants.empty() && !frame.formants.back())
      frame.formants.pop_back();
    track.frames.push_back(std::move(frame));
  }
  return track;
}

GciSequence read_gci_file(const std::string& path, int sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open GCI file: " + path);
  GciSequence out;
  std::string line;
  double prev = -1.0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double t = 0.0;
    try {
      t = std::stod(line);
    } catch (const std::exception&) {
      throw Error("GCI file " + path + ": bad value on line " + std::to_string(line_no));
    }
    if (t < 0.0)
      throw Error("GCI file " + path + ": negative time on line " + std::to_string(line_no));
    if (t <= prev)
      throw Error("GCI file " + path + ": times must ascend (line " +
                  std::to_string(line_no) + ")");
    prev = t;
    out.instants.push_back(std::llround(t * sample_rate_hz));
  }
  return out;
}

void write_gci_file(const std::string& path, const std::vector<double>& times_s) {
  AtomicWriter writer(path);
  writer.out << std::fixed << std::setprecision(6);
  for (double t : times_s) writer.out << t << '\n';
  writer.commit();
}

std::vector<LabelSpan> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path);
  std::vector<LabelSpan> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    LabelSpan span;
    std::string start, end;
    if (!std::getline(is, start, '\t') || !std::getline(is, end, '\t') ||
        !std::getline(is, span.category))
      throw Error("label file " + path + ": expected start<TAB>end<TAB>category");
    span.start_s = std::stod(start);
    span.end_s = std::stod(end);
    out.push_back(std::move(span));
  }
  return out;
}

}  // namespace ftrack
