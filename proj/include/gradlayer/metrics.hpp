#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gradlayer/errors.hpp"

namespace gradlayer {

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Per-step measurements of a functional-gradient run.
struct RunRecord {
  int step = 0;
  double objective = 0.0;
  double fgrad_norm_sq = 0.0;
  std::optional<double> w1_to_data;
  double wall_ms = 0.0;
};

/// Append-only record log; steps must increase strictly from 0.
class RunMetrics {
 public:
  void append(RunRecord r) {
    const int expected = records_.empty() ? 0 : records_.back().step + 1;
    if (r.step != expected) throw ShapeError("RunMetrics: steps must increase strictly from 0");
    records_.push_back(std::move(r));
  }

  std::size_t size() const { return records_.size(); }
  const RunRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<RunRecord>& records() const { return records_; }

 private:
  std::vector<RunRecord> records_;
};

/// One outer-iteration record of a finetune run. Values describe the state of
/// depth-k generation: the functional gradient uses the critic trained during
/// step k, evaluated at particles pushed through the first k layers.
struct FinetuneRow {
  int outer_step = 0;
  double critic_loss = 0.0;
  double penalty_mean = 0.0;
  double fgrad_norm_sq = 0.0;
  std::optional<double> w1_to_data;
};

inline std::string finetune_metrics_csv(const std::vector<FinetuneRow>& rows) {
  std::string out = "outer_step,critic_loss,penalty_mean,fgrad_norm_sq,w1_to_data\n";
  for (const auto& r : rows) {
    out += std::to_string(r.outer_step);
    out += ',';
    out += detail::format_double(r.critic_loss);
    out += ',';
    out += detail::format_double(r.penalty_mean);
    out += ',';
    out += detail::format_double(r.fgrad_norm_sq);
    out += ',';
    if (r.w1_to_data) out += detail::format_double(*r.w1_to_data);
    out += '\n';
  }
  return out;
}

inline std::string run_metrics_csv(const RunMetrics& metrics) {
  std::string out = "step,objective,fgrad_norm_sq,w1_to_data,wall_ms\n";
  for (const auto& r : metrics.records()) {
    out += std::to_string(r.step);
    out += ',';
    out += detail::format_double(r.objective);
    out += ',';
    out += detail::format_double(r.fgrad_norm_sq);
    out += ',';
    if (r.w1_to_data) out += detail::format_double(*r.w1_to_data);
    out += ',';
    out += detail::format_double(r.wall_ms);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gradlayer
