#include "regimes/term_dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "regimes/errors.hpp"

namespace regimes {

namespace {

std::vector<std::uint8_t> compute_degenerate_mask(const Eigen::MatrixXd& terms) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(terms.rows()), 0);
  for (Eigen::Index n = 0; n < terms.rows(); ++n) {
    mask[static_cast<std::size_t>(n)] =
        (terms.row(n).cwiseAbs().maxCoeff() == 0.0) ? 1 : 0;
  }
  return mask;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw validation_error("parse error at line " + std::to_string(line_no) +
                           ", column " + std::to_string(col + 1) +
                           ": not a number: '" + cell + "'");
  }
  return v;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw validation_error(std::string(what) + " contain NaN or Inf values");
  }
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

constexpr char kMagic[4] = {'R', 'G', 'S', 'C'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw validation_error("binary dataset truncated while reading header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_doubles_row_major(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      os.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  }
}

Eigen::MatrixXd read_doubles_row_major(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = 0.0;
      is.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!is) throw validation_error("binary dataset truncated while reading payload");
      m(r, c) = v;
    }
  }
  return m;
}

TermDataset load_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open dataset file: " + path);

  std::vector<std::string> names;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_cols = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("#fields:", 0) == 0) {
      names = split_csv(t.substr(8));
      have_header = true;
      continue;
    }
    if (t[0] == '#') continue;  // comment
    const auto cells = split_csv(t);
    if (expected_cols == 0) {
      expected_cols = cells.size();
    } else if (cells.size() != expected_cols) {
      throw validation_error("parse error at line " + std::to_string(line_no) +
                             ": expected " + std::to_string(expected_cols) +
                             " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row[c] = parse_cell(cells[c], line_no, c);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw validation_error("dataset file has no data rows: " + path);

  const std::size_t ncols = rows.front().size();
  if (have_header && names.size() != ncols) {
    throw validation_error("#fields: header names " + std::to_string(names.size()) +
                           " columns but rows have " + std::to_string(ncols));
  }

  // Reserved column names pick out weights and coordinates; everything else
  // is an equation term in declaration order.
  std::vector<std::size_t> term_cols;
  std::vector<std::string> term_names;
  int weight_col = -1;
  std::vector<std::pair<int, std::size_t>> coord_cols;  // (order key, column)
  if (have_header) {
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::string& nm = names[c];
      if (nm == "weight") {
        if (weight_col >= 0) throw validation_error("duplicate 'weight' column");
        weight_col = static_cast<int>(c);
      } else if (nm == "x") {
        coord_cols.emplace_back(0, c);
      } else if (nm == "y") {
        coord_cols.emplace_back(1, c);
      } else if (nm == "t") {
        coord_cols.emplace_back(2, c);
      } else {
        term_cols.push_back(c);
        term_names.push_back(nm);
      }
    }
    std::stable_sort(coord_cols.begin(), coord_cols.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  } else {
    for (std::size_t c = 0; c < ncols; ++c) term_cols.push_back(c);
  }

  if (term_cols.size() < 2) {
    throw validation_error("dataset must have at least 2 equation-term columns, found " +
                           std::to_string(term_cols.size()));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd terms(n, static_cast<Eigen::Index>(term_cols.size()));
  Eigen::MatrixXd coords(n, static_cast<Eigen::Index>(coord_cols.size()));
  Eigen::VectorXd weights;
  if (weight_col >= 0) weights.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < term_cols.size(); ++c) {
      terms(r, static_cast<Eigen::Index>(c)) = row[term_cols[c]];
    }
    for (std::size_t c = 0; c < coord_cols.size(); ++c) {
      coords(r, static_cast<Eigen::Index>(c)) = row[coord_cols[c].second];
    }
    if (weight_col >= 0) weights(r) = row[static_cast<std::size_t>(weight_col)];
  }
  return make_dataset(std::move(terms), std::move(weights), std::move(coords),
                      std::move(term_names));
}

TermDataset load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open dataset file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw validation_error("not a binary-grid dataset (bad magic): " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != 1) {
    throw validation_error("unsupported binary-grid version " + std::to_string(version));
  }
  const std::uint32_t n = read_u32(in);
  const std::uint32_t d = read_u32(in);
  const std::uint32_t c = read_u32(in);
  if (n == 0) throw validation_error("binary dataset has zero observations");
  if (d < 2) throw validation_error("dataset must have at least 2 equation terms, found " +
                                    std::to_string(d));
  Eigen::MatrixXd terms = read_doubles_row_major(in, n, d);
  Eigen::MatrixXd weights_m = read_doubles_row_major(in, n, 1);
  Eigen::MatrixXd coords = read_doubles_row_major(in, n, c);
  return make_dataset(std::move(terms), weights_m.col(0), std::move(coords));
}

}  // namespace

TermDataset make_dataset(Eigen::MatrixXd terms, Eigen::VectorXd weights,
                         Eigen::MatrixXd coords, std::vector<std::string> term_names) {
  if (terms.rows() < 1) throw validation_error("dataset must have at least one observation");
  if (terms.cols() < 2) {
    throw validation_error("dataset must have at least 2 equation terms, found " +
                           std::to_string(terms.cols()));
  }
  check_finite(terms, "equation terms");

  if (weights.size() == 0) {
    weights = Eigen::VectorXd::Ones(terms.rows());
  }
  if (weights.size() != terms.rows()) {
    throw validation_error("weights length does not match observation count");
  }
  check_finite(weights, "weights");
  if ((weights.array() < 0.0).any()) throw validation_error("weights must be non-negative");
  if (!(weights.sum() > 0.0)) throw validation_error("weights must have positive sum");

  if (coords.size() != 0 && coords.rows() != terms.rows()) {
    throw validation_error("coords rows do not match observation count");
  }
  if (coords.size() != 0) check_finite(coords, "coords");

  if (term_names.empty()) {
    for (Eigen::Index i = 0; i < terms.cols(); ++i) {
      term_names.push_back("e" + std::to_string(i + 1));
    }
  }
  if (static_cast<Eigen::Index>(term_names.size()) != terms.cols()) {
    throw validation_error("term_names length does not match term count");
  }

  TermDataset ds;
  ds.degenerate_mask = compute_degenerate_mask(terms);
  ds.terms = std::move(terms);
  ds.weights = std::move(weights);
  ds.coords = std::move(coords);
  ds.term_names = std::move(term_names);
  return ds;
}

TermDataset load_dataset(const std::string& path, DatasetFormat format) {
  return format == DatasetFormat::binary_grid ? load_binary(path) : load_text(path);
}

TermDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open dataset file: " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  const bool binary = in && std::memcmp(magic, kMagic, 4) == 0;
  in.close();
  return load_dataset(path, binary ? DatasetFormat::binary_grid : DatasetFormat::delimited_text);
}

void write_dataset(const TermDataset& ds, const std::string& path, DatasetFormat format) {
  const Eigen::Index c = ds.coords.size() == 0 ? 0 : ds.coords.cols();
  if (format == DatasetFormat::binary_grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open file for writing: " + path);
    out.write(kMagic, 4);
    write_u32(out, 1);
    write_u32(out, static_cast<std::uint32_t>(ds.n_samples()));
    write_u32(out, static_cast<std::uint32_t>(ds.n_terms()));
    write_u32(out, static_cast<std::uint32_t>(c));
    write_doubles_row_major(out, ds.terms);
    write_doubles_row_major(out, ds.weights);
    if (c > 0) write_doubles_row_major(out, ds.coords);
    if (!out) throw validation_error("write failed: " + path);
    return;
  }

  static const char* coord_names[] = {"x", "y", "t"};
  if (c > 3) {
    throw validation_error("delimited-text format supports at most 3 coordinate columns");
  }
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open file for writing: " + path);
  std::string header = "#fields: ";
  for (Eigen::Index i = 0; i < ds.n_terms(); ++i) {
    if (i) header += ',';
    header += ds.term_names[static_cast<std::size_t>(i)];
  }
  header += ",weight";
  for (Eigen::Index i = 0; i < c; ++i) {
    header += ',';
    header += coord_names[i];
  }
  out << header << '\n';
  std::string line;
  for (Eigen::Index r = 0; r < ds.n_samples(); ++r) {
    line.clear();
    for (Eigen::Index i = 0; i < ds.n_terms(); ++i) {
      if (i) line += ',';
      append_double(line, ds.terms(r, i));
    }
    line += ',';
    append_double(line, ds.weights(r));
    for (Eigen::Index i = 0; i < c; ++i) {
      line += ',';
      append_double(line, ds.coords(r, i));
    }
    out << line << '\n';
  }
  if (!out) throw validation_error("write failed: " + path);
}

Eigen::VectorXd compute_area_weights(const Eigen::MatrixXd& coords) {
  if (coords.size() == 0 || coords.cols() != 2) {
    throw validation_error("area weights require N x 2 coordinates");
  }
  const Eigen::Index n = coords.rows();

  std::set<double> xs_set, ys_set;
  for (Eigen::Index i = 0; i < n; ++i) {
    xs_set.insert(coords(i, 0));
    ys_set.insert(coords(i, 1));
  }
  std::vector<double> xs(xs_set.begin(), xs_set.end());
  std::vector<double> ys(ys_set.begin(), ys_set.end());
  if (xs.size() < 2 || ys.size() < 2) {
    throw validation_error("coords do not form a 2D grid (an axis has a single value)");
  }
  if (static_cast<Eigen::Index>(xs.size() * ys.size()) != n) {
    throw validation_error("coords do not form a tensor-product rectilinear grid");
  }

  // Cell widths: edges midway between adjacent axis values, outer edges
  // mirrored from the first/last spacing.
  auto widths = [](const std::vector<double>& v) {
    const std::size_t p = v.size();
    std::vector<double> w(p);
    for (std::size_t i = 0; i < p; ++i) {
      const double lo = (i == 0) ? v[0] - (v[1] - v[0]) / 2.0 : (v[i - 1] + v[i]) / 2.0;
      const double hi =
          (i + 1 == p) ? v[p - 1] + (v[p - 1] - v[p - 2]) / 2.0 : (v[i] + v[i + 1]) / 2.0;
      w[i] = hi - lo;
    }
    return w;
  };
  const std::vector<double> wx = widths(xs);
  const std::vector<double> wy = widths(ys);

  std::map<double, std::size_t> x_index, y_index;
  for (std::size_t i = 0; i < xs.size(); ++i) x_index[xs[i]] = i;
  for (std::size_t i = 0; i < ys.size(); ++i) y_index[ys[i]] = i;

  std::vector<std::uint8_t> seen(xs.size() * ys.size(), 0);
  Eigen::VectorXd weights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t xi = x_index.at(coords(i, 0));
    const std::size_t yi = y_index.at(coords(i, 1));
    const std::size_t cell = yi * xs.size() + xi;
    if (seen[cell]) {
      throw validation_error("coords do not form a tensor-product rectilinear grid "
                             "(duplicate grid point)");
    }
    seen[cell] = 1;
    weights(i) = wx[xi] * wy[yi];
  }
  return weights;
}

StandardizedView standardize(const TermDataset& ds) { return standardize_matrix(ds.terms); }

StandardizedView standardize_matrix(const Eigen::MatrixXd& values) {
  const Eigen::Index n = values.rows();
  if (n < 2) throw validation_error("standardize requires at least 2 observations");
  const Eigen::Index d = values.cols();

  StandardizedView view;
  view.means.resize(d);
  view.stds.resize(d);
  view.z.resize(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = values.col(j).mean();
    const double var = (values.col(j).array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    view.means(j) = mean;
    view.stds(j) = (sd == 0.0) ? 1.0 : sd;
    view.z.col(j) = (values.col(j).array() - mean) / view.stds(j);
  }
  return view;
}

}  // namespace regimes
