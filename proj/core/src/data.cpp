#include "hera/data.hpp"

#include "hera/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace hera {

namespace {

[[noreturn]] void parse_fail(const std::string& file, int line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, file + ":" + std::to_string(line) + ": " + reason);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    start = end + 1;
    if (end == s.size()) break;
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view tok, const std::string& file, int line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    parse_fail(file, line, "expected a real number, got '" + std::string(tok) + "'");
  }
  return value;
}

long long parse_int(std::string_view tok, const std::string& file, int line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    parse_fail(file, line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return value;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string file) : in_(in), file_(std::move(file)) {}

  bool next(std::string& out) {
    if (!std::getline(in_, out)) return false;
    ++line_;
    return true;
  }

  std::string required(const char* what) {
    std::string s;
    if (!next(s)) parse_fail(file_, line_ + 1, std::string("unexpected end of file, expected ") + what);
    return s;
  }

  void expect_trailing_blank() {
    std::string s;
    while (next(s)) {
      if (!trim(s).empty()) parse_fail(file_, line_, "unexpected trailing content");
    }
  }

  int line() const { return line_; }
  const std::string& file() const { return file_; }

 private:
  std::istream& in_;
  std::string file_;
  int line_ = 0;
};

long long round_half_even(double x) {
  const double f = std::floor(x);
  const double frac = x - f;
  const auto lo = static_cast<long long>(f);
  if (frac > 0.5) return lo + 1;
  if (frac < 0.5) return lo;
  return lo % 2 == 0 ? lo : lo + 1;
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void CorruptionSpec::validate(Index num_labels) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
  }
  if (r < 1 || r > num_labels - 1) {
    throw Error(ErrorCode::RTooLarge, "r = " + std::to_string(r) + " with q = " +
                                          std::to_string(num_labels) +
                                          " labels (need 1 <= r <= q-1)");
  }
  if (epsilon) {
    if (!(*epsilon >= 0.0 && *epsilon <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
    }
    if (p != 1.0 || r != 1) {
      throw Error(ErrorCode::InvalidArgument, "the epsilon protocol requires p = 1 and r = 1");
    }
  }
}

PartialLabelDataset corrupt(const PartialLabelDataset& clean, const CorruptionSpec& spec) {
  validate_dataset(clean);
  const Index n = clean.num_instances();
  const Index q = clean.num_labels();
  if (!clean.ground_truth) {
    throw Error(ErrorCode::MissingGroundTruth, "corruption needs ground truth");
  }
  for (Index j = 0; j < n; ++j) {
    if (clean.candidates.col(j).sum() != 1.0) {
      throw Error(ErrorCode::MissingGroundTruth,
                  "input must be fully labeled; column " + std::to_string(j) +
                      " has more than one candidate");
    }
  }
  spec.validate(q);

  PartialLabelDataset out = clean;
  const IntVector& truth = *clean.ground_truth;
  Rng rng(spec.seed);

  if (spec.epsilon) {
    const double eps = *spec.epsilon;
    for (Index j = 0; j < n; ++j) {
      const int y = truth(j);
      const int coupling = (y + 1) % static_cast<int>(q);
      int added = coupling;
      if (!(rng.next_double() < eps) && q > 2) {
        // uniform over labels that are neither the truth nor the coupling label
        auto pick = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(q - 2)));
        for (int label = 0; label < static_cast<int>(q); ++label) {
          if (label == y || label == coupling) continue;
          if (pick == 0) {
            added = label;
            break;
          }
          --pick;
        }
      }
      out.candidates(added, j) = 1.0;
    }
    return out;
  }

  const long long m = round_half_even(spec.p * static_cast<double>(n));
  std::vector<int> perm = rng.permutation(static_cast<int>(n));
  std::vector<int> selected(perm.begin(), perm.begin() + m);
  std::sort(selected.begin(), selected.end());

  for (const int j : selected) {
    std::vector<int> others;
    others.reserve(static_cast<std::size_t>(q) - 1);
    for (int label = 0; label < static_cast<int>(q); ++label) {
      if (label != truth(j)) others.push_back(label);
    }
    // partial Fisher-Yates: the first r entries are a uniform r-subset
    for (int t = 0; t < spec.r; ++t) {
      const auto pick = t + static_cast<int>(rng.bounded(others.size() - static_cast<std::size_t>(t)));
      std::swap(others[static_cast<std::size_t>(t)], others[static_cast<std::size_t>(pick)]);
      out.candidates(others[static_cast<std::size_t>(t)], j) = 1.0;
    }
  }
  return out;
}

PartialLabelDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  LineReader reader(in, path);

  {
    const std::string magic = reader.required("header");
    const auto t = tokens(magic);
    if (t.size() != 2 || t[0] != "PLL" || t[1] != "1") {
      parse_fail(path, reader.line(), "expected header 'PLL 1'");
    }
  }

  Index n = 0, d = 0, q = 0;
  {
    const std::string dims = reader.required("dimensions 'n d q'");
    const auto t = tokens(dims);
    if (t.size() != 3) parse_fail(path, reader.line(), "expected 'n d q'");
    n = parse_int(t[0], path, reader.line());
    d = parse_int(t[1], path, reader.line());
    q = parse_int(t[2], path, reader.line());
    if (n < 1 || d < 1 || q < 2) {
      parse_fail(path, reader.line(), "need n >= 1, d >= 1, q >= 2");
    }
  }

  PartialLabelDataset ds;
  ds.features.resize(d, n);
  ds.candidates = Matrix::Zero(q, n);

  for (Index i = 0; i < n; ++i) {
    const std::string row = reader.required("a feature row");
    const auto t = tokens(row);
    if (static_cast<Index>(t.size()) != d) {
      parse_fail(path, reader.line(),
                 "expected " + std::to_string(d) + " feature values, got " +
                     std::to_string(t.size()));
    }
    for (Index c = 0; c < d; ++c) {
      ds.features(c, i) = parse_double(t[static_cast<std::size_t>(c)], path, reader.line());
    }
  }

  for (Index i = 0; i < n; ++i) {
    const std::string row = reader.required("a candidate row");
    const auto t = tokens(row);
    if (t.empty()) parse_fail(path, reader.line(), "empty candidate set");
    for (const auto& tok : t) {
      const long long label = parse_int(tok, path, reader.line());
      if (label < 1 || label > q) {
        parse_fail(path, reader.line(),
                   "label " + std::to_string(label) + " outside 1.." + std::to_string(q));
      }
      if (ds.candidates(label - 1, i) == 1.0) {
        parse_fail(path, reader.line(), "duplicate label " + std::to_string(label));
      }
      ds.candidates(label - 1, i) = 1.0;
    }
  }

  std::string marker;
  if (reader.next(marker)) {
    if (trim(marker) == "TRUTH") {
      IntVector truth(n);
      for (Index i = 0; i < n; ++i) {
        const std::string row = reader.required("a true label");
        const auto t = tokens(row);
        if (t.size() != 1) parse_fail(path, reader.line(), "expected one true label");
        const long long label = parse_int(t[0], path, reader.line());
        if (label < 1 || label > q) {
          parse_fail(path, reader.line(),
                     "label " + std::to_string(label) + " outside 1.." + std::to_string(q));
        }
        if (ds.candidates(label - 1, i) != 1.0) {
          throw Error(ErrorCode::TruthNotInCandidates,
                      path + ":" + std::to_string(reader.line()) + ": true label " +
                          std::to_string(label) + " is not a candidate of instance " +
                          std::to_string(i + 1));
        }
        truth(i) = static_cast<int>(label - 1);
      }
      ds.ground_truth = std::move(truth);
      reader.expect_trailing_blank();
    } else if (trim(marker).empty()) {
      reader.expect_trailing_blank();
    } else {
      parse_fail(path, reader.line(), "unexpected content after candidate rows");
    }
  }

  validate_dataset(ds);
  return ds;
}

void save_dataset(const PartialLabelDataset& ds, const std::string& path) {
  validate_dataset(ds);
  const Index n = ds.num_instances();
  const Index d = ds.feature_dim();
  const Index q = ds.num_labels();

  std::string out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 2) * 12);
  out += "PLL 1\n";
  out += std::to_string(n) + " " + std::to_string(d) + " " + std::to_string(q) + "\n";
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) {
      if (c > 0) out += ' ';
      append_double(out, ds.features(c, i));
    }
    out += '\n';
  }
  for (Index i = 0; i < n; ++i) {
    bool first = true;
    for (Index label = 0; label < q; ++label) {
      if (ds.candidates(label, i) == 1.0) {
        if (!first) out += ' ';
        out += std::to_string(label + 1);
        first = false;
      }
    }
    out += '\n';
  }
  if (ds.ground_truth) {
    out += "TRUTH\n";
    for (Index i = 0; i < n; ++i) {
      out += std::to_string((*ds.ground_truth)(i) + 1);
      out += '\n';
    }
  }
  write_file(path, out);
}

PartialLabelDataset load_csv_dataset(const std::string& features_path,
                                     const std::string& labels_path) {
  std::ifstream fin(features_path, std::ios::binary);
  if (!fin) throw Error(ErrorCode::IoError, "cannot open '" + features_path + "'");
  std::ifstream lin(labels_path, std::ios::binary);
  if (!lin) throw Error(ErrorCode::IoError, "cannot open '" + labels_path + "'");

  LineReader freader(fin, features_path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (freader.next(line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      row.push_back(parse_double(trim(cell), features_path, freader.line()));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_fail(features_path, freader.line(), "inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_fail(features_path, 1, "no feature rows");

  LineReader lreader(lin, labels_path);
  std::vector<std::vector<long long>> labels;
  while (lreader.next(line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    std::vector<long long> ls;
    for (const auto& cell : cells) {
      const auto t = trim(cell);
      if (t.empty()) continue;
      const long long label = parse_int(t, labels_path, lreader.line());
      if (label < 1) parse_fail(labels_path, lreader.line(), "labels are 1-based");
      ls.push_back(label);
    }
    if (ls.empty()) parse_fail(labels_path, lreader.line(), "empty candidate list");
    labels.push_back(std::move(ls));
  }
  if (labels.size() != rows.size()) {
    parse_fail(labels_path, lreader.line(),
               "label rows (" + std::to_string(labels.size()) + ") do not match feature rows (" +
                   std::to_string(rows.size()) + ")");
  }

  const auto n = static_cast<Index>(rows.size());
  const auto d = static_cast<Index>(rows.front().size());
  long long q = 2;
  for (const auto& ls : labels) {
    for (const long long label : ls) q = std::max(q, label);
  }

  PartialLabelDataset ds;
  ds.features.resize(d, n);
  ds.candidates = Matrix::Zero(q, n);
  bool all_singleton = true;
  IntVector truth(n);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) {
      ds.features(c, i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
    const auto& ls = labels[static_cast<std::size_t>(i)];
    for (const long long label : ls) ds.candidates(label - 1, i) = 1.0;
    if (ls.size() == 1) {
      truth(i) = static_cast<int>(ls.front() - 1);
    } else {
      all_singleton = false;
    }
  }
  if (all_singleton) ds.ground_truth = std::move(truth);
  validate_dataset(ds);
  return ds;
}

std::vector<FoldSplit> kfold_split(int n, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) {
    throw Error(ErrorCode::BadFoldCount,
                "folds = " + std::to_string(folds) + " with n = " + std::to_string(n));
  }
  const std::vector<int> perm = Rng(seed).permutation(n);
  std::vector<FoldSplit> splits(static_cast<std::size_t>(folds));
  const int base = n / folds;
  const int rem = n % folds;
  int offset = 0;
  for (int f = 0; f < folds; ++f) {
    const int size = base + (f < rem ? 1 : 0);
    splits[static_cast<std::size_t>(f)].test.assign(perm.begin() + offset,
                                                    perm.begin() + offset + size);
    offset += size;
  }
  std::vector<char> in_test(static_cast<std::size_t>(n));
  for (auto& split : splits) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (const int j : split.test) in_test[static_cast<std::size_t>(j)] = 1;
    split.train.reserve(static_cast<std::size_t>(n - static_cast<int>(split.test.size())));
    for (int j = 0; j < n; ++j) {
      if (!in_test[static_cast<std::size_t>(j)]) split.train.push_back(j);
    }
  }
  return splits;
}

void save_model(const SavedModel& saved, const std::string& path) {
  const Index d = saved.model.weights.rows();
  const Index q = saved.model.weights.cols();
  const Index n = saved.confidence.cols();
  if (saved.confidence.rows() != q) {
    throw Error(ErrorCode::ShapeMismatch, "confidence rows must match weight columns");
  }

  std::string out;
  out += "PLLMODEL 1\n";
  out += std::to_string(d) + " " + std::to_string(q) + " " + std::to_string(n) + "\n";
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < q; ++j) {
      if (j > 0) out += ' ';
      append_double(out, saved.model.weights(i, j));
    }
    out += '\n';
  }
  for (Index i = 0; i < q; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j > 0) out += ' ';
      append_double(out, saved.confidence(i, j));
    }
    out += '\n';
  }
  const Hyperparams& hp = saved.params;
  const auto field = [&out](const char* name, const std::string& value) {
    out += name;
    out += ' ';
    out += value;
    out += '\n';
  };
  field("alpha", format_double(hp.alpha));
  field("beta", format_double(hp.beta));
  field("mu", format_double(hp.mu));
  field("nu", format_double(hp.nu));
  field("lambda0", format_double(hp.lambda0));
  field("rho0", format_double(hp.rho0));
  field("lambda_max", format_double(hp.lambda_max));
  field("rho_max", format_double(hp.rho_max));
  field("tau", format_double(hp.tau));
  field("eta_w", format_double(hp.eta_w));
  field("eta_p", format_double(hp.eta_p));
  field("inner_steps", std::to_string(hp.inner_steps));
  field("iter_max", std::to_string(hp.iter_max));
  field("loss_tol", format_double(hp.loss_tol));
  field("k_neighbors", std::to_string(hp.k_neighbors));
  write_file(path, out);
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  LineReader reader(in, path);

  {
    const std::string header = reader.required("header");
    const auto t = tokens(header);
    if (t.size() != 2 || t[0] != "PLLMODEL" || t[1] != "1") {
      parse_fail(path, reader.line(), "expected header 'PLLMODEL 1'");
    }
  }
  Index d = 0, q = 0, n = 0;
  {
    const std::string dims = reader.required("dimensions 'd q n'");
    const auto t = tokens(dims);
    if (t.size() != 3) parse_fail(path, reader.line(), "expected 'd q n'");
    d = parse_int(t[0], path, reader.line());
    q = parse_int(t[1], path, reader.line());
    n = parse_int(t[2], path, reader.line());
    if (d < 1 || q < 2 || n < 1) parse_fail(path, reader.line(), "need d >= 1, q >= 2, n >= 1");
  }

  SavedModel saved;
  saved.model.weights.resize(d, q);
  saved.confidence.resize(q, n);
  const auto read_row = [&](Matrix& m, Index row, Index width) {
    const std::string line = reader.required("a matrix row");
    const auto t = tokens(line);
    if (static_cast<Index>(t.size()) != width) {
      parse_fail(path, reader.line(),
                 "expected " + std::to_string(width) + " values, got " + std::to_string(t.size()));
    }
    for (Index c = 0; c < width; ++c) {
      m(row, c) = parse_double(t[static_cast<std::size_t>(c)], path, reader.line());
    }
  };
  for (Index i = 0; i < d; ++i) read_row(saved.model.weights, i, q);
  for (Index i = 0; i < q; ++i) read_row(saved.confidence, i, n);

  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    const auto t = tokens(line);
    if (t.size() != 2) parse_fail(path, reader.line(), "expected 'name value'");
    const std::string_view name = t[0];
    Hyperparams& hp = saved.params;
    if (name == "alpha") hp.alpha = parse_double(t[1], path, reader.line());
    else if (name == "beta") hp.beta = parse_double(t[1], path, reader.line());
    else if (name == "mu") hp.mu = parse_double(t[1], path, reader.line());
    else if (name == "nu") hp.nu = parse_double(t[1], path, reader.line());
    else if (name == "lambda0") hp.lambda0 = parse_double(t[1], path, reader.line());
    else if (name == "rho0") hp.rho0 = parse_double(t[1], path, reader.line());
    else if (name == "lambda_max") hp.lambda_max = parse_double(t[1], path, reader.line());
    else if (name == "rho_max") hp.rho_max = parse_double(t[1], path, reader.line());
    else if (name == "tau") hp.tau = parse_double(t[1], path, reader.line());
    else if (name == "eta_w") hp.eta_w = parse_double(t[1], path, reader.line());
    else if (name == "eta_p") hp.eta_p = parse_double(t[1], path, reader.line());
    else if (name == "inner_steps") hp.inner_steps = static_cast<int>(parse_int(t[1], path, reader.line()));
    else if (name == "iter_max") hp.iter_max = static_cast<int>(parse_int(t[1], path, reader.line()));
    else if (name == "loss_tol") hp.loss_tol = parse_double(t[1], path, reader.line());
    else if (name == "k_neighbors") hp.k_neighbors = static_cast<int>(parse_int(t[1], path, reader.line()));
    else parse_fail(path, reader.line(), "unknown field '" + std::string(name) + "'");
  }
  return saved;
}

}  // namespace hera
