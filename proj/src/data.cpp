#include "bdc/data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bdc/format.hpp"
#include "bdc/rng.hpp"

namespace bdc {

GaussianMixture nine_component_mixture() {
  const double centers[9][2] = {{0, 0}, {1, 1}, {-1, -1}, {-1, 1}, {1, -1}, {2, 0}, {-2, 0}, {0, 2}, {0, -2}};
  GaussianMixture gm;
  for (const auto& c : centers) {
    gm.weights.push_back(1.0 / 9.0);
    gm.means.push_back((Vector(2) << c[0], c[1]).finished());
    gm.covariances.push_back(Matrix::Identity(2, 2));
  }
  return gm;
}

MixtureSample gen_gaussian_mixture_2d(Index n, std::uint64_t seed) {
  require(n >= 1, "gen_gaussian_mixture_2d: n must be positive");
  GaussianMixture gm = nine_component_mixture();
  RngStream rng(seed);
  Matrix pts = sample_mixture(gm, n, rng);
  return {std::move(pts), std::move(gm)};
}

Projection project_random_gaussian(const Matrix& x, Index dim, std::uint64_t seed) {
  if (dim < x.cols())
    fail(ErrorCode::InvalidArgument, "project_random_gaussian: target dimension is below the input dimension");
  RngStream rng(seed);
  Matrix p = rng.normal_matrix(x.cols(), dim);
  Matrix projected = x * p;
  return {std::move(projected), std::move(p)};
}

Matrix project_random_tanh(const Matrix& x, Index dim, Index hidden, std::uint64_t seed) {
  require(dim >= 1 && hidden >= 1, "project_random_tanh: widths must be positive");
  RngStream rng(seed);
  const Matrix w1 = rng.normal_matrix(x.cols(), hidden, 1.0 / std::sqrt(static_cast<double>(x.cols())));
  const Matrix w2 = rng.normal_matrix(hidden, dim, 1.0 / std::sqrt(static_cast<double>(hidden)));
  const Matrix h = (x * w1).array().tanh().matrix();
  return (h * w2).array().tanh().matrix();
}

double swiss_roll_response(double u, double v) {
  const double pi = std::numbers::pi;
  const double a = u / (3.0 * pi) - (1.0 + 3.0 * pi) / 2.0;
  return 4.0 * a * a + (pi / 20.0) * v;
}

SwissRoll gen_swiss_roll(Index n, std::uint64_t seed, double response_noise) {
  require(n >= 1, "gen_swiss_roll: n must be positive");
  require(response_noise >= 0.0, "gen_swiss_roll: response noise must be non-negative");
  const double pi = std::numbers::pi;
  RngStream rng(seed);
  SwissRoll out{Matrix(n, 3), Vector(n), Vector(n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const double u = rng.uniform(1.5 * pi, 4.5 * pi);
    const double v = rng.uniform(0.0, 20.0);
    out.u(i) = u;
    out.v(i) = v;
    out.points(i, 0) = u * std::cos(u) + rng.normal();
    out.points(i, 1) = v + rng.normal();
    out.points(i, 2) = u * std::sin(u) + rng.normal();
    out.responses(i) = swiss_roll_response(u, v) + response_noise * rng.normal();
  }
  return out;
}

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 2) fail(ErrorCode::InvalidArgument, "standardize: need at least two rows");
  Standardizer s;
  const Index d = x.cols();
  s.means_ = Vector(d);
  s.stds_ = Vector(d);
  s.constant_.assign(static_cast<std::size_t>(d), false);
  const double n = static_cast<double>(x.rows());
  for (Index j = 0; j < d; ++j) {
    const double mean = x.col(j).sum() / n;
    const double var = (x.col(j).array() - mean).square().sum() / (n - 1.0);
    if (var > 0.0) {
      s.means_(j) = mean;
      s.stds_(j) = std::sqrt(var);
    } else {
      // Passed through unchanged.
      s.means_(j) = 0.0;
      s.stds_(j) = 1.0;
      s.constant_[static_cast<std::size_t>(j)] = true;
    }
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != means_.size()) fail(ErrorCode::InvalidArgument, "standardize: column count mismatch");
  Matrix out = x;
  for (Index j = 0; j < x.cols(); ++j) out.col(j) = (x.col(j).array() - means_(j)) / stds_(j);
  return out;
}

Matrix Standardizer::invert(const Matrix& z) const {
  if (z.cols() != means_.size()) fail(ErrorCode::InvalidArgument, "standardize: column count mismatch");
  Matrix out = z;
  for (Index j = 0; j < z.cols(); ++j) out.col(j) = z.col(j).array() * stds_(j) + means_(j);
  return out;
}

Matrix one_hot(const std::vector<Index>& labels, Index classes) {
  require(classes >= 1, "one_hot: need at least one class");
  Matrix out = Matrix::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      fail(ErrorCode::InvalidArgument,
           "one_hot: label " + std::to_string(labels[i]) + " at row " + std::to_string(i) + " is out of range");
    out(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return out;
}

std::vector<Index> argmax_project(const Matrix& w) {
  require(w.cols() >= 1, "argmax_project: no columns");
  std::vector<Index> labels(static_cast<std::size_t>(w.rows()));
  for (Index i = 0; i < w.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < w.cols(); ++j)
      if (w(i, j) > w(i, best)) best = j;
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

}  // namespace

CsvTable load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");

  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) lines.emplace_back(line_no, line);
  }
  if (lines.empty()) fail(ErrorCode::EmptyInput, "'" + path.string() + "' is empty");

  CsvTable table;
  std::size_t first = 0;
  const auto head = split_cells(lines[0].second);
  bool numeric = true;
  for (auto c : head) numeric = numeric && parse_double(c).has_value();
  if (!numeric) {
    for (auto c : head) table.header.emplace_back(c);
    first = 1;
  }

  const auto cols = static_cast<Index>(head.size());
  table.values = Matrix(static_cast<Index>(lines.size() - first), cols);
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto cells = split_cells(lines[r].second);
    const int row_no = lines[r].first;
    if (static_cast<Index>(cells.size()) != cols)
      fail(ErrorCode::Parse, path.string() + ": row " + std::to_string(row_no) + " has " +
                                 std::to_string(cells.size()) + " columns, expected " + std::to_string(cols));
    for (Index c = 0; c < cols; ++c) {
      const auto v = parse_double(cells[static_cast<std::size_t>(c)]);
      if (!v)
        fail(ErrorCode::Parse, path.string() + ": row " + std::to_string(row_no) + ", column " +
                                   std::to_string(c + 1) + ": '" + std::string(cells[static_cast<std::size_t>(c)]) +
                                   "' is not a number");
      table.values(static_cast<Index>(r - first), c) = *v;
    }
  }
  return table;
}

std::vector<std::string> default_header(const std::string& prefix, Index count) {
  std::vector<std::string> h;
  for (Index j = 0; j < count; ++j) h.push_back(prefix + std::to_string(j));
  return h;
}

void save_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header) {
  const auto names = header.empty() ? default_header("x", values.cols()) : header;
  if (static_cast<Index>(names.size()) != values.cols())
    fail(ErrorCode::InvalidArgument, "save_csv: header has " + std::to_string(names.size()) + " names for " +
                                         std::to_string(values.cols()) + " columns");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

}  // namespace bdc
