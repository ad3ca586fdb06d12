#include "fhn/reference_signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

ReferenceSignal ReferenceSignal::zero(std::size_t outputs) {
  ReferenceSignal r;
  r.outputs_ = outputs;
  r.constant_zero_ = true;
  return r;
}

ReferenceSignal ReferenceSignal::from_log(const TrajectoryLog& log) {
  std::vector<double> t;
  std::vector<std::vector<double>> y;
  t.reserve(log.size());
  y.reserve(log.size());
  for (const auto& s : log.samples) {
    t.push_back(s.t);
    y.push_back(s.y);
  }
  return ReferenceSignal(std::move(t), std::move(y));
}

ReferenceSignal::ReferenceSignal(std::vector<double> times,
                                 std::vector<std::vector<double>> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() < 2 || values_.size() != times_.size()) {
    throw DomainError("ReferenceSignal: need at least two samples");
  }
  outputs_ = values_[0].size();
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (values_[i].size() != outputs_) throw DomainError("ReferenceSignal: ragged values");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DomainError("ReferenceSignal: times must be strictly increasing");
    }
  }
  const std::size_t n = times_.size();
  slopes_.assign(n, std::vector<double>(outputs_, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < outputs_; ++c) {
      if (n == 2) {
        slopes_[i][c] = (values_[1][c] - values_[0][c]) / (times_[1] - times_[0]);
      } else if (i == 0 || i == n - 1) {
        // Second-order one-sided difference.
        const std::size_t a = i == 0 ? 0 : n - 1;
        const std::size_t b = i == 0 ? 1 : n - 2;
        const std::size_t c2 = i == 0 ? 2 : n - 3;
        const double h1 = times_[b] - times_[a];
        const double h2 = times_[c2] - times_[a];
        const double d1 = (values_[b][c] - values_[a][c]) / h1;
        const double d2 = (values_[c2][c] - values_[a][c]) / h2;
        slopes_[i][c] = (d1 * h2 - d2 * h1) / (h2 - h1);
      } else {
        const double hm = times_[i] - times_[i - 1];
        const double hp = times_[i + 1] - times_[i];
        const double dm = (values_[i][c] - values_[i - 1][c]) / hm;
        const double dp = (values_[i + 1][c] - values_[i][c]) / hp;
        slopes_[i][c] = (hp * dm + hm * dp) / (hm + hp);
      }
    }
  }
}

double ReferenceSignal::t_begin() const {
  return constant_zero_ ? -INFINITY : times_.front();
}

double ReferenceSignal::t_end() const {
  return constant_zero_ ? INFINITY : times_.back();
}

bool ReferenceSignal::covers(double t0, double t1) const {
  if (constant_zero_) return true;
  const double eps = 1e-9 * std::max(1.0, std::fabs(t1));
  return t0 >= times_.front() - eps && t1 <= times_.back() + eps;
}

void ReferenceSignal::eval(double t, std::span<double> out) const {
  if (out.size() != outputs_) throw DomainError("ReferenceSignal::eval: dimension mismatch");
  if (constant_zero_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double eps = 1e-9 * std::max(1.0, std::fabs(times_.back()));
  if (t < times_.front() - eps || t > times_.back() + eps) {
    throw DomainError("reference signal evaluated at t=" + std::to_string(t) +
                      " outside [" + std::to_string(times_.front()) + ", " +
                      std::to_string(times_.back()) + "]");
  }
  t = std::clamp(t, times_.front(), times_.back());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (i >= times_.size() - 1) i = times_.size() - 2;
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = (s3 - 2 * s2 + s) * h;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = (s3 - s2) * h;
  for (std::size_t c = 0; c < outputs_; ++c) {
    out[c] = h00 * values_[i][c] + h10 * slopes_[i][c] + h01 * values_[i + 1][c] +
             h11 * slopes_[i + 1][c];
  }
}

std::vector<double> ReferenceSignal::eval(double t) const {
  std::vector<double> out(outputs_);
  eval(t, out);
  return out;
}

double ReferenceSignal::sup_norm() const {
  double sup = 0.0;
  for (const auto& v : values_) {
    double s = 0.0;
    for (double x : v) s += x * x;
    sup = std::max(sup, std::sqrt(s));
  }
  return sup;
}

}  // namespace fhn
