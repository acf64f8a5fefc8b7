#include "cli_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "regimes/errors.hpp"

namespace regimes::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw validation_error("cannot open file for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw validation_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open input for hashing: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char out[19];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

int to_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("not an integer: '" + s + "'");
  }
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("not a number: '" + s + "'");
  }
}

}  // namespace

std::vector<int> parse_int_range(const std::string& spec) {
  if (spec.find(',') != std::string::npos) {
    std::vector<int> out;
    for (const auto& piece : split(spec, ',')) out.push_back(to_int(piece));
    return out;
  }
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {to_int(parts[0])};
  if (parts.size() > 3) throw config_error("bad range '" + spec + "' (want lo:hi[:step])");
  const int lo = to_int(parts[0]);
  const int hi = to_int(parts[1]);
  const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
  if (step < 1) throw config_error("range step must be positive in '" + spec + "'");
  if (hi < lo) throw config_error("empty range '" + spec + "'");
  std::vector<int> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

std::vector<double> parse_log_range(const std::string& spec, int default_count) {
  if (spec.find(',') != std::string::npos) {
    std::vector<double> out;
    for (const auto& piece : split(spec, ',')) out.push_back(to_double(piece));
    return out;
  }
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {to_double(parts[0])};
  if (parts.size() > 3) throw config_error("bad range '" + spec + "' (want lo:hi[:count])");
  const double lo = to_double(parts[0]);
  const double hi = to_double(parts[1]);
  const int count = parts.size() == 3 ? to_int(parts[2]) : default_count;
  if (!(lo > 0.0) || !(hi > 0.0)) throw config_error("log-spaced range needs positive bounds");
  if (hi < lo) throw config_error("empty range '" + spec + "'");
  if (count < 1) throw config_error("range count must be positive in '" + spec + "'");
  std::vector<double> out;
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double log_lo = std::log10(lo);
  const double log_hi = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out.push_back(std::pow(10.0, log_lo + f * (log_hi - log_lo)));
  }
  return out;
}

void write_manifest(const fs::path& dir, const ManifestInfo& info) {
  json m;
  m["artifact"] = "regimes";
  m["version"] = REGIMES_VERSION;
  m["command"] = info.command;
  m["argv"] = info.argv;
  m["seed"] = info.seed;
  m["config"] = info.config;
  json inputs = json::object();
  for (const auto& p : info.input_paths) inputs[p] = hash_file(p);
  m["input_hashes"] = inputs;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  m["created_utc"] = stamp;
  atomic_write(dir / "manifest.json", m.dump(2) + "\n");
}

std::string grid_csv(const SweepResult& result, bool has_alpha) {
  std::string out = "k";
  if (has_alpha) {
    for (const double a : result.alpha_values) {
      out += ',';
      out += format_double(a);
    }
  } else {
    out += ",-";
  }
  out += '\n';
  for (std::size_t ki = 0; ki < result.k_values.size(); ++ki) {
    out += std::to_string(result.k_values[ki]);
    for (Eigen::Index ai = 0; ai < result.grid_scores.cols(); ++ai) {
      out += ',';
      const double v = result.grid_scores(static_cast<Eigen::Index>(ki), ai);
      if (!std::isnan(v)) out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string mask_string(const Hypothesis& h) {
  std::string s;
  s.reserve(h.mask.size());
  for (const auto b : h.mask) s += b ? '1' : '0';
  return s;
}

}  // namespace

std::string labels_csv(const TermDataset& ds, const std::vector<int>& labels,
                       const HypothesisArray& masks, const ScoreReport& report) {
  static const char* coord_names[] = {"x", "y", "t"};
  const Eigen::Index c = ds.coords.size() == 0 ? 0 : ds.coords.cols();
  std::string out = "index";
  for (Eigen::Index j = 0; j < c && j < 3; ++j) {
    out += ',';
    out += coord_names[j];
  }
  out += ",label,mask,m,gamma,omega\n";
  const std::string full(static_cast<std::size_t>(ds.n_terms()), '1');
  for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index j = 0; j < c && j < 3; ++j) {
      out += ',';
      out += format_double(ds.coords(i, j));
    }
    out += ',';
    out += std::to_string(labels[static_cast<std::size_t>(i)]);
    out += ',';
    // Degenerate observations are reported with the full-set hypothesis.
    if (ds.degenerate_mask[static_cast<std::size_t>(i)]) {
      out += full;
    } else {
      out += mask_string(masks[static_cast<std::size_t>(i)]);
    }
    const auto& b = report.local[static_cast<std::size_t>(i)];
    out += ',';
    out += format_double(b.m);
    out += ',';
    out += format_double(b.gamma);
    out += ',';
    out += format_double(b.omega);
    out += '\n';
  }
  return out;
}

json summary_json(const SweepResult& result, const TermDataset& ds) {
  json s;
  json best;
  best["k"] = result.best_k;
  if (result.alpha_values.size() == 1 && result.alpha_values[0] == 0.0) {
    best["alpha"] = nullptr;
  } else {
    best["alpha"] = result.best_alpha;
  }
  best["seed"] = result.best_seed;
  s["best_point"] = best;
  s["global_score"] = result.reported_score();
  s["best_grid_score"] = result.best_global_score;
  s["full_set_score"] = result.full_set_score;
  s["fell_back"] = result.fell_back_to_full_set;

  // Cluster sizes from the winning assignment.
  std::map<int, int> sizes;
  for (const int l : result.best_assignment.labels) sizes[l] += 1;
  json clusters = json::array();
  for (const auto& ch : result.best_hypotheses) {
    json c;
    c["id"] = ch.cluster_id;
    c["size"] = sizes.count(ch.cluster_id) ? sizes[ch.cluster_id] : 0;
    c["mask"] = mask_string(ch.hypothesis);
    json names = json::array();
    for (std::size_t j = 0; j < ch.hypothesis.mask.size(); ++j) {
      if (ch.hypothesis.mask[j]) names.push_back(ds.term_names[j]);
    }
    c["names"] = names;
    c["cluster_score"] = ch.cluster_score;
    if (!ch.converged) c["converged"] = false;
    clusters.push_back(c);
  }
  s["clusters"] = clusters;
  if (!result.warnings.empty()) s["warnings"] = result.warnings;
  return s;
}

std::string score_report_csv(const TermDataset& ds, const HypothesisArray& masks,
                             const ScoreReport& report) {
  static const char* coord_names[] = {"x", "y", "t"};
  const Eigen::Index c = ds.coords.size() == 0 ? 0 : ds.coords.cols();
  std::string out = "index";
  for (Eigen::Index j = 0; j < c && j < 3; ++j) {
    out += ',';
    out += coord_names[j];
  }
  out += ",mask,m,gamma,omega\n";
  const std::string full(static_cast<std::size_t>(ds.n_terms()), '1');
  for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index j = 0; j < c && j < 3; ++j) {
      out += ',';
      out += format_double(ds.coords(i, j));
    }
    out += ',';
    if (ds.degenerate_mask[static_cast<std::size_t>(i)]) {
      out += full;
    } else {
      out += mask_string(masks[static_cast<std::size_t>(i)]);
    }
    const auto& b = report.local[static_cast<std::size_t>(i)];
    out += ',';
    out += format_double(b.m);
    out += ',';
    out += format_double(b.gamma);
    out += ',';
    out += format_double(b.omega);
    out += '\n';
  }
  return out;
}

std::string timing_csv(const std::vector<BenchRow>& rows, const std::string& clusterer,
                       const std::string& selector) {
  std::string out = "axis,value,clusterer,selector,seconds,t_over_t0\n";
  for (const auto& row : rows) {
    out += row.axis;
    out += ',';
    out += format_double(row.axis_value);
    out += ',';
    out += clusterer;
    out += ',';
    out += selector;
    out += ',';
    out += format_double(row.seconds);
    out += ',';
    out += format_double(row.t_over_t0);
    out += '\n';
  }
  return out;
}

}  // namespace regimes::cli
