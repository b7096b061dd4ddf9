#include "memsvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "memsvm/rng.hpp"

namespace memsvm {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

double parse_cell(const std::string& tok, Index row, Index col) {
  const std::string t = trimmed(tok);
  if (!t.empty()) {
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size()) return v;
  }
  std::ostringstream msg;
  msg << "csv: non-numeric value '" << tok << "' at row " << row << ", column " << col;
  throw DataError(msg.str());
}

Dataset load_rows(const std::string& path, Index label_column, bool header,
                  const std::string* label_name) {
  std::ifstream f(path);
  if (!f) throw DataError("csv: cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trimmed(lines.back()).empty()) lines.pop_back();

  std::size_t first = 0;
  if (label_name != nullptr) {
    if (lines.empty()) throw DataError("csv: no header line in " + path);
    auto cols = split_commas(lines[0]);
    auto it = std::find(cols.begin(), cols.end(), *label_name);
    if (it == cols.end())
      throw DataError("csv: no column named '" + *label_name + "' in " + path);
    label_column = Index(it - cols.begin());
    header = true;
  }
  if (header) first = 1;
  if (lines.size() <= first) throw DataError("csv: no data rows in " + path);

  const Index ncols = Index(split_commas(lines[first]).size());
  if (ncols < 2)
    throw DataError("csv: need at least one feature column and a label column in " + path);
  Index label_at = label_column < 0 ? ncols - 1 : label_column;
  if (label_at >= ncols) {
    std::ostringstream msg;
    msg << "csv: label column " << label_at << " out of range, file has " << ncols
        << " columns: " << path;
    throw DataError(msg.str());
  }

  const Index nrows = Index(lines.size() - first);
  Dataset ds;
  ds.X.resize(nrows, ncols - 1);
  ds.y.resize(nrows);
  std::unordered_map<std::string, Index> dict;

  for (Index r = 0; r < nrows; ++r) {
    const Index file_row = Index(first) + r + 1;  // 1-based physical line
    auto cells = split_commas(lines[first + std::size_t(r)]);
    if (Index(cells.size()) != ncols) {
      std::ostringstream msg;
      msg << "csv: row " << file_row << " has " << cells.size() << " columns, expected "
          << ncols << ": " << path;
      throw DataError(msg.str());
    }
    Index fcol = 0;
    for (Index c = 0; c < ncols; ++c) {
      if (c == label_at) continue;
      ds.X(r, fcol++) = parse_cell(cells[std::size_t(c)], file_row, c + 1);
    }
    const std::string label = trimmed(cells[std::size_t(label_at)]);
    auto [it, fresh] = dict.try_emplace(label, Index(ds.label_names.size()));
    if (fresh) ds.label_names.push_back(label);
    ds.y(r) = int(it->second);
  }
  ds.c = Index(ds.label_names.size());
  if (ds.c < 2) throw DataError("csv: needs at least 2 distinct labels: " + path);
  return ds;
}

// Proportional per-class allocation of `want` slots, one slot minimum per
// class, remainders by largest fractional part (ties toward lower class).
std::vector<Index> allocate_per_class(const std::vector<Index>& class_sizes, Index want,
                                      double fraction) {
  const Index c = Index(class_sizes.size());
  std::vector<Index> base(static_cast<std::size_t>(c));
  std::vector<std::pair<double, Index>> rema;
  Index total = 0;
  for (Index k = 0; k < c; ++k) {
    double quota = double(class_sizes[std::size_t(k)]) * fraction;
    Index b = Index(quota);
    b = std::max<Index>(b, 1);
    b = std::min(b, class_sizes[std::size_t(k)]);
    base[std::size_t(k)] = b;
    total += b;
    rema.emplace_back(quota - std::floor(quota), k);
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto& [frac, k] : rema) {
    (void)frac;
    if (total >= want) break;
    if (base[std::size_t(k)] < class_sizes[std::size_t(k)]) {
      ++base[std::size_t(k)];
      ++total;
    }
  }
  return base;
}

Dataset take_rows(const Dataset& ds, std::vector<Index> idx) {
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.X.resize(Index(idx.size()), ds.X.cols());
  out.y.resize(Index(idx.size()));
  for (Index i = 0; i < Index(idx.size()); ++i) {
    out.X.row(i) = ds.X.row(idx[std::size_t(i)]);
    out.y(i) = ds.y(idx[std::size_t(i)]);
  }
  out.c = ds.c;
  out.label_names = ds.label_names;
  out.norm = ds.norm;
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, Index label_column, bool header) {
  return load_rows(path, label_column, header, nullptr);
}

Dataset load_csv_named_label(const std::string& path, const std::string& label_name) {
  return load_rows(path, -1, true, &label_name);
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("csv: cannot write " + path);
  f << std::setprecision(17);
  for (Index r = 0; r < ds.X.rows(); ++r) {
    for (Index c = 0; c < ds.X.cols(); ++c) f << ds.X(r, c) << ',';
    f << ds.label_names[std::size_t(ds.y(r))] << '\n';
  }
}

Dataset normalize(const Dataset& ds) {
  Dataset out = ds;
  const Index d = ds.X.cols();
  out.norm.min = ds.X.colwise().minCoeff();
  out.norm.max = ds.X.colwise().maxCoeff();
  for (Index c = 0; c < d; ++c) {
    double range = out.norm.max[c] - out.norm.min[c];
    if (range > 0)
      out.X.col(c) = (ds.X.col(c).array() - out.norm.min[c]) / range;
    else
      out.X.col(c).setZero();
  }
  return out;
}

Dataset apply_normalization(const Dataset& ds, const Normalization& n) {
  if (n.min.size() != ds.X.cols())
    throw ConfigError("normalization metadata does not match the feature count");
  Dataset out = ds;
  for (Index c = 0; c < ds.X.cols(); ++c) {
    double range = n.max[c] - n.min[c];
    if (range > 0)
      out.X.col(c) = ((ds.X.col(c).array() - n.min[c]) / range).cwiseMax(0.0).cwiseMin(1.0);
    else
      out.X.col(c).setZero();
  }
  out.norm = n;
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ConfigError("split: train_fraction must be inside (0, 1)");
  const Index n = ds.X.rows();
  if (n < 2) throw ConfigError("split: need at least 2 samples");

  Index n_train = Index(std::llround(double(n) * spec.train_fraction));
  n_train = std::clamp<Index>(n_train, 1, n - 1);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  auto eng = make_engine(spec.seed, 0x5317u);
  std::shuffle(order.begin(), order.end(), eng);

  std::vector<Index> train_idx, test_idx;
  if (!spec.stratified) {
    train_idx.assign(order.begin(), order.begin() + n_train);
    test_idx.assign(order.begin() + n_train, order.end());
  } else {
    std::vector<Index> sizes(static_cast<std::size_t>(ds.c), 0);
    for (Index i = 0; i < n; ++i) ++sizes[std::size_t(ds.y(i))];
    auto quota = allocate_per_class(sizes, n_train, spec.train_fraction);
    std::vector<Index> taken(static_cast<std::size_t>(ds.c), 0);
    for (Index i : order) {
      auto k = std::size_t(ds.y(i));
      if (taken[k] < quota[k]) {
        train_idx.push_back(i);
        ++taken[k];
      } else {
        test_idx.push_back(i);
      }
    }
  }
  if (train_idx.empty() || test_idx.empty())
    throw ConfigError("split: both splits must be non-empty");
  return {take_rows(ds, std::move(train_idx)), take_rows(ds, std::move(test_idx))};
}

std::optional<SyntheticKind> synthetic_kind_from_name(const std::string& name) {
  if (name == "two_class_100x2") return SyntheticKind::two_class_100x2;
  if (name == "three_class_100x3") return SyntheticKind::three_class_100x3;
  if (name == "nine_class_1000x9") return SyntheticKind::nine_class_1000x9;
  return std::nullopt;
}

std::string name_of(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::two_class_100x2: return "two_class_100x2";
    case SyntheticKind::three_class_100x3: return "three_class_100x3";
    case SyntheticKind::nine_class_1000x9: return "nine_class_1000x9";
  }
  return "?";
}

Dataset gen_synthetic(SyntheticKind kind, std::uint64_t seed) {
  Index n = 0, d = 0, c = 0;
  switch (kind) {
    case SyntheticKind::two_class_100x2: n = 100, d = 2, c = 2; break;
    case SyntheticKind::three_class_100x3: n = 100, d = 3, c = 3; break;
    case SyntheticKind::nine_class_1000x9: n = 1000, d = 9, c = 9; break;
  }
  Dataset ds;
  ds.X.resize(n, d);
  ds.y.resize(n);
  ds.c = c;
  Index row = 0;
  for (Index k = 0; k < c; ++k) {
    ds.label_names.push_back(std::to_string(k));
    const Index nk = n / c + (k < n % c ? 1 : 0);
    auto eng = make_engine(seed, 0x5e9u, std::uint64_t(kind), std::uint64_t(k));
    std::normal_distribution<double> noise(0.0, synthetic_blob_sigma);
    for (Index i = 0; i < nk; ++i, ++row) {
      for (Index j = 0; j < d; ++j)
        ds.X(row, j) = (j == k ? 0.85 : 0.15) + noise(eng);
      ds.y(row) = int(k);
    }
  }
  return ds;
}

Dataset to_binary(const Dataset& ds, const std::string& positive_label) {
  auto it = std::find(ds.label_names.begin(), ds.label_names.end(), positive_label);
  if (it == ds.label_names.end())
    throw DataError("no class named '" + positive_label + "' in the dataset");
  const int pos = int(it - ds.label_names.begin());
  Dataset out = ds;
  for (Index i = 0; i < ds.y.size(); ++i) out.y(i) = ds.y(i) == pos ? 1 : 0;
  out.c = 2;
  out.label_names = {"rest", positive_label};
  return out;
}

Dataset subsample_stratified(const Dataset& ds, Index max_samples, std::uint64_t seed) {
  const Index n = ds.X.rows();
  if (max_samples <= 0 || max_samples >= n) return ds;

  std::vector<Index> sizes(static_cast<std::size_t>(ds.c), 0);
  for (Index i = 0; i < n; ++i) ++sizes[std::size_t(ds.y(i))];
  auto quota = allocate_per_class(sizes, max_samples, double(max_samples) / double(n));

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  auto eng = make_engine(seed, 0x5ab5u);
  std::shuffle(order.begin(), order.end(), eng);

  std::vector<Index> keep;
  std::vector<Index> taken(static_cast<std::size_t>(ds.c), 0);
  for (Index i : order) {
    auto k = std::size_t(ds.y(i));
    if (taken[k] < quota[k] && Index(keep.size()) < max_samples) {
      keep.push_back(i);
      ++taken[k];
    }
  }
  return take_rows(ds, std::move(keep));
}

MatrixXd load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("matrix: cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trimmed(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("matrix: no rows in " + path);

  const Index ncols = Index(split_commas(lines[0]).size());
  MatrixXd m(Index(lines.size()), ncols);
  for (Index r = 0; r < m.rows(); ++r) {
    auto cells = split_commas(lines[std::size_t(r)]);
    if (Index(cells.size()) != ncols) {
      std::ostringstream msg;
      msg << "matrix: row " << r + 1 << " has " << cells.size() << " columns, expected "
          << ncols << ": " << path;
      throw DataError(msg.str());
    }
    for (Index c = 0; c < ncols; ++c) m(r, c) = parse_cell(cells[std::size_t(c)], r + 1, c + 1);
  }
  return m;
}

void save_matrix(const MatrixXd& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("matrix: cannot write " + path);
  f << std::setprecision(17);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) f << (c ? "," : "") << m(r, c);
    f << "\n";
  }
}

}  // namespace memsvm
