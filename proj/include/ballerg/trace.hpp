#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ballerg/error.hpp"

namespace ballerg {

struct TraceRow {
  unsigned j = 0;
  std::string name;
  double value = 0.0;
};

// One labelled quantity sampled at strictly increasing iteration indices.
class ConvergenceTrace {
 public:
  explicit ConvergenceTrace(std::string name) : name_(std::move(name)) {}

  void push(unsigned j, double value) {
    if (!points_.empty() && j <= points_.back().first) {
      throw Error(ErrorCode::InvalidArgument, "trace '" + name_ + "' indices must increase");
    }
    points_.emplace_back(j, value);
  }

  const std::string& name() const { return name_; }
  const std::vector<std::pair<unsigned, double>>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  double last() const { return points_.back().second; }
  double value_at(std::size_t index) const { return points_.at(index).second; }

  std::vector<TraceRow> rows() const {
    std::vector<TraceRow> out;
    out.reserve(points_.size());
    for (const auto& [j, v] : points_) out.push_back({j, name_, v});
    return out;
  }

 private:
  std::string name_;
  std::vector<std::pair<unsigned, double>> points_;
};

}  // namespace ballerg
