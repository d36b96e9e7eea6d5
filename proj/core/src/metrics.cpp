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

#include "ftrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace ftrack {
namespace {

double track_hop_s(const FormantTrack& t) {
  if (t.frames.size() >= 2) {
    std::vector<double> dt;
    dt.reserve(t.frames.size() - 1);
    for (size_t i = 1; i < t.frames.size(); ++i)
      dt.push_back(t.frames[i].time_s - t.frames[i - 1].time_s);
    std::nth_element(dt.begin(), dt.begin() + dt.size() / 2, dt.end());
    return dt[dt.size() / 2];
  }
  return t.config.shift_ms * 1e-3;
}

bool in_selected_span(double time_s, const std::vector<LabelSpan>& labels,
                      const std::set<std::string>& categories) {
  for (const LabelSpan& span : labels) {
    if (time_s >= span.start_s && time_s < span.end_s)
      return categories.count(span.category) > 0;
  }
  return false;
}

}  // namespace

std::vector<AlignedFrame> align_tracks(const FormantTrack& hyp,
                                       const FormantTrack& ref,
                                       const std::vector<LabelSpan>* labels,
                                       const std::set<std::string>* categories) {
  if (hyp.frames.empty() || ref.frames.empty())
    throw Error("align_tracks: empty track");
  const double tol = 0.5 * std::min(track_hop_s(hyp), track_hop_s(ref)) + 1e-9;

  static const std::set<std::string> kDefaultCategories = {"vowel", "diphthong",
                                                           "semivowel"};
  const std::set<std::string>* selected = categories;
  if (labels != nullptr && selected == nullptr) selected = &kDefaultCategories;

  std::vector<AlignedFrame> out;
  size_t cursor = 0;
  for (const FormantFrame& rf : ref.frames) {
    if (labels != nullptr && !in_selected_span(rf.time_s, *labels, *selected))
      continue;
    while (cursor + 1 < hyp.frames.size() &&
           std::abs(hyp.frames[cursor + 1].time_s - rf.time_s) <=
               std::abs(hyp.frames[cursor].time_s - rf.time_s))
      ++cursor;
    const FormantFrame& hf = hyp.frames[cursor];
    if (std::abs(hf.time_s - rf.time_s) > tol) continue;

    AlignedFrame frame;
    frame.time_s = rf.time_s;
    const size_t slots = std::max(rf.formants.size(), hf.formants.size());
    frame.ref_hz.resize(slots);
    frame.hyp_hz.resize(slots);
    for (size_t i = 0; i < slots; ++i) {
      if (i < rf.formants.size() && rf.formants[i])
        frame.ref_hz[i] = rf.formants[i]->frequency_hz;
      if (i < hf.formants.size() && hf.formants[i])
        frame.hyp_hz[i] = hf.formants[i]->frequency_hz;
    }
    out.push_back(std::move(frame));
  }
  if (out.empty()) throw Error("align_tracks: tracks have no overlapping frames");
  return out;
}

double fdr(const std::vector<AlignedFrame>& aligned, EvalThresholds t, int i) {
  int64_t considered = 0, detected = 0;
  for (const AlignedFrame& frame : aligned) {
    if (i >= static_cast<int>(frame.ref_hz.size()) || !frame.ref_hz[i]) continue;
    ++considered;
    if (i >= static_cast<int>(frame.hyp_hz.size()) || !frame.hyp_hz[i]) continue;
    const double ref = *frame.ref_hz[i];
    const double delta = std::abs(ref - *frame.hyp_hz[i]);
    if (delta / ref < t.tau_r && delta < t.tau_a) ++detected;
  }
  if (considered == 0) throw Error("fdr: no reference frames for this formant");
  return 100.0 * static_cast<double>(detected) / static_cast<double>(considered);
}

double fee(const std::vector<AlignedFrame>& aligned, int i) {
  int64_t count = 0;
  double acc = 0.0;
  for (const AlignedFrame& frame : aligned) {
    if (i >= static_cast<int>(frame.ref_hz.size()) || !frame.ref_hz[i]) continue;
    if (i >= static_cast<int>(frame.hyp_hz.size()) || !frame.hyp_hz[i]) continue;
    acc += std::abs(*frame.ref_hz[i] - *frame.hyp_hz[i]);
    ++count;
  }
  if (count == 0) throw Error("fee: no hypothesized frames for this formant");
  return acc / static_cast<double>(count);
}

double EvalReport::overall_fee(int count) const {
  double acc = 0.0;
  int n = 0;
  for (int i = 0; i < count && i < static_cast<int>(per_formant.size()); ++i) {
    if (per_formant[i].fee_frames == 0) continue;
    acc += per_formant[i].fee_hz;
    ++n;
  }
  return n > 0 ? acc / n : 0.0;
}

EvalReport evaluate(const FormantTrack& hyp, const FormantTrack& ref,
                    EvalThresholds t, const std::vector<LabelSpan>* labels,
                    const std::set<std::string>* categories,
                    const std::string& name) {
  const std::vector<AlignedFrame> aligned = align_tracks(hyp, ref, labels, categories);
  size_t slots = 0;
  for (const AlignedFrame& f : aligned) slots = std::max(slots, f.ref_hz.size());

  EvalReport report;
  report.name = name;
  report.thresholds = t;
  report.aligned_frames = static_cast<int64_t>(aligned.size());
  for (size_t i = 0; i < slots; ++i) {
    FormantScore score;
    for (const AlignedFrame& frame : aligned) {
      const bool has_ref = i < frame.ref_hz.size() && frame.ref_hz[i].has_value();
      const bool has_hyp = i < frame.hyp_hz.size() && frame.hyp_hz[i].has_value();
      if (has_ref) ++score.fdr_frames;
      if (has_ref && has_hyp) ++score.fee_frames;
    }
    score.fdr_percent = score.fdr_frames > 0 ? fdr(aligned, t, static_cast<int>(i)) : 0.0;
    score.fee_hz = score.fee_frames > 0 ? fee(aligned, static_cast<int>(i)) : 0.0;
    report.per_formant.push_back(score);
  }
  return report;
}

EvalReport summarize(const std::vector<EvalReport>& reports, const std::string& name) {
  if (reports.empty()) throw Error("summarize: no reports");
  EvalReport out;
  out.name = name;
  out.thresholds = reports.front().thresholds;
  size_t slots = 0;
  for (const EvalReport& r : reports) slots = std::max(slots, r.per_formant.size());
  out.per_formant.resize(slots);
  for (size_t i = 0; i < slots; ++i) {
    int64_t n_fdr = 0, n_fee = 0;
    for (const EvalReport& r : reports) {
      if (i >= r.per_formant.size()) continue;
      const FormantScore& s = r.per_formant[i];
      if (s.fdr_frames > 0) {
        out.per_formant[i].fdr_percent += s.fdr_percent;
        out.per_formant[i].fdr_frames += s.fdr_frames;
        ++n_fdr;
      }
      if (s.fee_frames > 0) {
        out.per_formant[i].fee_hz += s.fee_hz;
        out.per_formant[i].fee_frames += s.fee_frames;
        ++n_fee;
      }
    }
    if (n_fdr > 0) out.per_formant[i].fdr_percent /= static_cast<double>(n_fdr);
    if (n_fee > 0) out.per_formant[i].fee_hz /= static_cast<double>(n_fee);
  }
  for (const EvalReport& r : reports) out.aligned_frames += r.aligned_frames;
  return out;
}

std::string render_report(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed;
  if (!report.name.empty()) os << report.name << "\n";
  os << "  thresholds: tau_r=" << std::setprecision(3) << report.thresholds.tau_r
     << " tau_a=" << std::setprecision(1) << report.thresholds.tau_a << " Hz"
     << "  (frames: " << report.aligned_frames << ")\n";
  os << "  formant   FDR(%)   FEE(Hz)   frames\n";
  for (size_t i = 0; i < report.per_formant.size(); ++i) {
    const FormantScore& s = report.per_formant[i];
    os << "  F" << (i + 1) << "        " << std::setw(6) << std::setprecision(1)
       << s.fdr_percent << "   " << std::setw(7) << s.fee_hz << "   "
       << std::setw(6) << s.fee_frames << "\n";
  }
  os << "  overall FEE (F1-F3): " << std::setprecision(1) << report.overall_fee()
     << " Hz\n";
  return os.str();
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "name,formant,fdr_percent,fee_hz,fdr_frames,fee_frames\n";
  os << std::fixed << std::setprecision(4);
  for (size_t i = 0; i < report.per_formant.size(); ++i) {
    const FormantScore& s = report.per_formant[i];
    os << report.name << ",F" << (i + 1) << "," << s.fdr_percent << "," << s.fee_hz
       << "," << s.fdr_frames << "," << s.fee_frames << "\n";
  }
  return os.str();
}

}  // namespace ftrack
