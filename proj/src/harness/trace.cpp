#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "dlsq/harness.hpp"

namespace dlsq {

int Trace::col_omega(int node, int j) const {
  int col = 1 + 2 * node_count * dimension;
  for (int i = 0; i < node; ++i) col += k_per_node[i];
  return col + j;
}

int Trace::col_identifier_error(int node) const {
  int col = 1 + 2 * node_count * dimension;
  for (int k : k_per_node) col += k;
  return col + node;
}

int Trace::col_compensation(int node) const {
  int col = 1 + 2 * node_count * dimension;
  for (int k : k_per_node) col += k;
  if (has_identifier) col += node_count;
  return col + node;
}

double Trace::node_error(std::size_t row, const Eigen::VectorXd& ref) const {
  double worst = 0.0;
  for (int i = 0; i < node_count; ++i) {
    double sq = 0.0;
    for (int c = 0; c < dimension; ++c) {
      const double d = value(row, col_x(i, c)) - ref(c);
      sq += d * d;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

double Trace::stacked_sq_error(std::size_t row, const Eigen::VectorXd& ref) const {
  double total = 0.0;
  for (int i = 0; i < node_count; ++i)
    for (int c = 0; c < dimension; ++c) {
      const double d = value(row, col_x(i, c)) - ref(c);
      total += d * d;
    }
  return total;
}

void export_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("export_csv: cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < trace.columns.size(); ++c) {
    if (c) out << ',';
    out << trace.columns[c];
  }
  out << '\n';
  char buf[32];
  const std::size_t ncols = trace.columns.size();
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", trace.value(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out.good()) throw ValidationError("export_csv: write to '" + path + "' failed");
}

double fit_decay_rate(const Trace& trace, double t0, double t1, const Eigen::VectorXd& ystar) {
  std::vector<double> ts, ys;
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    const double t = trace.time(r);
    if (t < t0 || t > t1) continue;
    ts.push_back(t);
    ys.push_back(std::log(std::max(trace.node_error(r, ystar), 1e-300)));
  }
  if (ts.size() < 10)
    throw ValidationError("fit_decay_rate: window [" + std::to_string(t0) + ", " +
                          std::to_string(t1) + "] holds fewer than 10 samples");
  const double n = static_cast<double>(ts.size());
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (ys[i] - my);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  if (den == 0.0) throw ValidationError("fit_decay_rate: degenerate time window");
  return num / den;
}

double error_energy(const Trace& trace, double t0, double t1, const Eigen::VectorXd& ystar) {
  double acc = 0.0;
  double prev_t = 0.0, prev_q = 0.0;
  bool have_prev = false;
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    const double t = trace.time(r);
    if (t < t0 || t > t1) continue;
    const double q = trace.stacked_sq_error(r, ystar);
    if (have_prev) acc += 0.5 * (q + prev_q) * (t - prev_t);
    prev_t = t;
    prev_q = q;
    have_prev = true;
  }
  return acc;
}

}  // namespace dlsq
