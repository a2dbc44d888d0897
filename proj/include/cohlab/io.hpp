#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cohlab/channels.hpp"
#include "cohlab/coherence.hpp"
#include "cohlab/density.hpp"
#include "cohlab/discord.hpp"
#include "cohlab/measurement.hpp"
#include "cohlab/metrology.hpp"
#include "cohlab/polygamy.hpp"

namespace cohlab {

using json = nlohmann::ordered_json;

namespace detail {

inline CMatrix parse_block(const json& re, const json* im, Index rows, Index cols) {
  auto read_part = [&](const json& part, const char* name) {
    if (!part.is_array() || static_cast<Index>(part.size()) != rows)
      throw Error(ErrorKind::ParseError, std::string("\"") + name + "\" must have " + std::to_string(rows) + " rows");
    Eigen::MatrixXd out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      const json& row = part[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != cols)
        throw Error(ErrorKind::ParseError, std::string("row ") + std::to_string(i) + " of \"" + name + "\" must have " +
                                               std::to_string(cols) + " entries");
      for (Index j = 0; j < cols; ++j) {
        const json& v = row[static_cast<std::size_t>(j)];
        if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string("non-numeric entry in \"") + name + "\"");
        out(i, j) = v.get<double>();
      }
    }
    return out;
  };
  CMatrix m = read_part(re, "re").cast<Complex>();
  if (im) m += Complex(0.0, 1.0) * read_part(*im, "im").cast<Complex>();
  return m;
}

inline int read_dim(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer())
    throw Error(ErrorKind::ParseError, std::string("missing integer \"") + key + "\"");
  const int d = j[key].get<int>();
  if (d < 1) throw Error(ErrorKind::ParseError, std::string("\"") + key + "\" must be positive");
  return d;
}

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline CMatrix parse_re_im(const json& j, Index rows, Index cols) {
  if (!j.is_object() || !j.contains("re")) throw Error(ErrorKind::ParseError, "missing \"re\"");
  return parse_block(j["re"], j.contains("im") ? &j["im"] : nullptr, rows, cols);
}

}  // namespace detail

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

/// {"dim": N, "re": [[...]], "im": [[...]]}; "im" may be omitted for real matrices.
inline CMatrix matrix_from_json(const json& j) {
  const int d = detail::read_dim(j, "dim");
  return detail::parse_re_im(j, d, d);
}

inline json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  json j;
  j["dim"] = m.rows();
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline DensityMatrix state_from_json(const json& j) { return validate_density(matrix_from_json(j)); }
inline DensityMatrix read_state(const std::string& path) { return state_from_json(read_json_file(path)); }

inline Observable observable_from_json(const json& j) { return Observable(matrix_from_json(j)); }
inline Observable read_observable(const std::string& path) { return observable_from_json(read_json_file(path)); }

/// {"dim_in": N, "dim_out": M, "ops": [{"re": ..., "im": ...}, ...]}
inline KrausChannel channel_from_json(const json& j) {
  const int din = detail::read_dim(j, "dim_in");
  const int dout = detail::read_dim(j, "dim_out");
  if (!j.contains("ops") || !j["ops"].is_array() || j["ops"].empty())
    throw Error(ErrorKind::ParseError, "\"ops\" must be a non-empty array");
  std::vector<CMatrix> ops;
  for (const auto& op : j["ops"]) ops.push_back(detail::parse_re_im(op, dout, din));
  return KrausChannel(std::move(ops));
}

inline KrausChannel read_channel(const std::string& path) { return channel_from_json(read_json_file(path)); }

inline json channel_to_json(const KrausChannel& ch) {
  json j;
  j["dim_in"] = ch.dim_in();
  j["dim_out"] = ch.dim_out();
  json ops = json::array();
  for (const auto& m : ch.operators()) {
    json op = matrix_to_json(m);
    op.erase("dim");
    ops.push_back(std::move(op));
  }
  j["ops"] = std::move(ops);
  return j;
}

inline json to_json(const Bounds& b) { return json{{"lower", b.lower}, {"upper", b.upper}}; }

inline json to_json(const CoherenceReport& r) {
  json j;
  j["dim"] = r.dim;
  j["c_skew"] = r.c_skew;
  j["c_rel"] = r.c_rel;
  j["c_l1"] = r.c_l1;
  j["c_l2"] = r.c_l2;
  j["purity"] = r.purity;
  j["skew_per_k"] = r.skew_per_k;
  j["skew_bounds"] = to_json(r.skew_bounds);
  j["l1_bounds"] = to_json(r.l1_bounds);
  return j;
}

inline json to_json(const MonotonicityVerdict& v) {
  return json{{"c_before", v.c_before},
              {"c_avg_after", v.c_avg_after},
              {"c_after", v.c_after},
              {"strong_ok", v.strong_ok},
              {"weak_ok", v.weak_ok}};
}

inline json to_json(const DiscordResult& r) {
  json j;
  j["value"] = r.value;
  j["converged"] = r.converged;
  j["restarts_used"] = r.restarts_used;
  j["upper_bound"] = r.upper_bound;
  j["lower_bound"] = r.lower_bound ? json(*r.lower_bound) : json(nullptr);
  j["sandwich_ok"] = r.sandwich_ok;
  j["basis_a"] = matrix_to_json(r.basis.u_a);
  j["basis_b"] = matrix_to_json(r.basis.u_b);
  j["restart_values"] = r.restart_values;
  return j;
}

inline json to_json(const MetrologyReport& r) {
  json j;
  j["n_runs"] = r.n_runs;
  j["coherence"] = r.coherence;
  json per = json::array();
  for (std::size_t k = 0; k < r.per_k.size(); ++k) {
    const auto& e = r.per_k[k];
    per.push_back(json{{"k", k},
                       {"skew", e.skew},
                       {"fisher", e.fisher},
                       {"optimal_variance", detail::finite_or_null(e.optimal_variance)},
                       {"variance_lower", detail::finite_or_null(e.variance_lower)},
                       {"variance_upper", detail::finite_or_null(e.variance_upper)},
                       {"within", e.within},
                       {"excluded", e.excluded}});
  }
  j["per_k"] = std::move(per);
  j["sum_inverse_variance"] = r.sum_inverse_variance;
  j["aggregate_lower"] = r.aggregate_lower;
  j["aggregate_upper"] = r.aggregate_upper;
  j["aggregate_ok"] = r.aggregate_ok;
  j["average_variance"] = detail::finite_or_null(r.average_variance);
  j["average_variance_lower"] = detail::finite_or_null(r.average_variance_lower);
  j["average_variance_upper"] = detail::finite_or_null(r.average_variance_upper);
  j["excluded_count"] = r.excluded_count;
  return j;
}

inline json to_json(const MeasuredEstimates& m) {
  json j;
  json shots = json::array();
  for (const auto& s : m.shot_records)
    shots.push_back(json{{"power", s.power},
                         {"shots", s.shots},
                         {"plus_count", s.plus_count},
                         {"p_plus_hat", s.p_plus_hat},
                         {"trace_power_hat", s.trace_power_hat}});
  j["shot_records"] = std::move(shots);
  j["trace_powers"] = m.trace_powers;
  j["eigenvalues"] = m.spectrum.eigenvalues;
  j["max_imag"] = m.spectrum.max_imag;
  j["ill_conditioned"] = m.spectrum.ill_conditioned;
  j["diagonal"] = m.diagonal;
  j["c_rel"] = m.c_rel_hat;
  j["c_l2"] = m.c_l2_hat;
  j["skew_bounds"] = to_json(m.skew_bounds_hat);
  j["swap_test_settings"] = m.swap_test_settings;
  j["projector_measurements"] = m.projector_measurements;
  return j;
}

inline json to_json(const PolygamySummary& s) {
  return json{{"samples", s.samples},
              {"min_gap", s.min_gap},
              {"mean_gap", s.mean_gap},
              {"pure_form_violations", s.pure_form_violations},
              {"corollary1_violations", s.corollary1_violations},
              {"min_corollary1_gap", s.min_corollary1_gap}};
}

inline json error_json(const Error& e) {
  return json{{"error", to_string(e.kind())}, {"message", e.what()}};
}

}  // namespace cohlab
