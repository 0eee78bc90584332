#include "bdc/model.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "bdc/format.hpp"

namespace bdc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void write_row(std::ostream& out, const double* values, Index count) {
  for (Index j = 0; j < count; ++j) {
    if (j) out << ' ';
    out << format_double(values[j]);
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next() {
    std::string line;
    if (!std::getline(in_, line)) fail(ErrorCode::Parse, "model: unexpected end of file after line " + std::to_string(line_));
    ++line_;
    return std::istringstream(line);
  }

  void read_row(double* dst, Index count) {
    auto ss = next();
    std::string tok;
    Index j = 0;
    while (ss >> tok) {
      if (j == count) fail(ErrorCode::Parse, "model: line " + std::to_string(line_) + " has too many values");
      const auto v = parse_double(tok);
      if (!v) fail(ErrorCode::Parse, "model: line " + std::to_string(line_) + ": bad number '" + tok + "'");
      dst[j++] = *v;
    }
    if (j != count)
      fail(ErrorCode::Parse, "model: line " + std::to_string(line_) + " has " + std::to_string(j) +
                                 " values, expected " + std::to_string(count));
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

Index read_positive(std::istringstream& ss, LineReader& r, const char* what) {
  long long v = 0;
  if (!(ss >> v) || v <= 0)
    fail(ErrorCode::Parse, "model: line " + std::to_string(r.line()) + ": bad " + what);
  return static_cast<Index>(v);
}

void expect_keyword(std::istringstream& ss, LineReader& r, const std::string& keyword) {
  std::string tok;
  if (!(ss >> tok) || tok != keyword)
    fail(ErrorCode::Parse, "model: line " + std::to_string(r.line()) + ": expected '" + keyword + "'");
}

DenseLayer read_layer(LineReader& r) {
  auto header = r.next();
  expect_keyword(header, r, "layer");
  const Index in = read_positive(header, r, "layer input width");
  const Index out = read_positive(header, r, "layer output width");
  DenseLayer l{Matrix(in, out), Vector(out)};
  for (Index i = 0; i < in; ++i) r.read_row(l.weights.data() + i * out, out);
  r.read_row(l.bias.data(), out);
  return l;
}

void write_layer(std::ostream& out, const DenseLayer& l) {
  out << "layer " << l.in() << ' ' << l.out() << '\n';
  for (Index i = 0; i < l.in(); ++i) write_row(out, l.weights.data() + i * l.out(), l.out());
  write_row(out, l.bias.data(), l.bias.size());
}

}  // namespace

Matrix encode(const AutoencoderModel& model, const Matrix& x) {
  return std::visit(overloaded{[&](const StiefelPoint& v) { return encode(v, x); },
                               [&](const Mlp& m) { return mlp_encode(m, x); }},
                    model);
}

Matrix decode(const AutoencoderModel& model, const Matrix& z) {
  return std::visit(overloaded{[&](const StiefelPoint& v) { return decode(v, z); },
                               [&](const Mlp& m) { return mlp_decode(m, z); }},
                    model);
}

Index ambient_dim(const AutoencoderModel& model) {
  return std::visit(overloaded{[](const StiefelPoint& v) { return v.ambient_dim(); },
                               [](const Mlp& m) { return m.input_dim(); }},
                    model);
}

Index latent_dim(const AutoencoderModel& model) {
  return std::visit(overloaded{[](const StiefelPoint& v) { return v.latent_dim(); },
                               [](const Mlp& m) { return m.latent_dim(); }},
                    model);
}

DecoderHandle make_decoder(const AutoencoderModel& model) {
  return std::visit(
      overloaded{[](const StiefelPoint& v) -> DecoderHandle { return std::make_shared<LinearDecoder>(v); },
                 [](const Mlp& m) -> DecoderHandle { return std::make_shared<MlpDecoder>(m); }},
      model);
}

void write_model(std::ostream& out, const AutoencoderModel& model) {
  std::visit(overloaded{[&](const StiefelPoint& v) {
                          const Matrix& vm = v.matrix();
                          out << "linear " << vm.rows() << ' ' << vm.cols() << '\n';
                          for (Index i = 0; i < vm.rows(); ++i) write_row(out, vm.data() + i * vm.cols(), vm.cols());
                        },
                        [&](const Mlp& m) {
                          out << "mlp " << m.encoder.size() << ' ' << m.decoder.size() << '\n';
                          for (const auto& l : m.encoder) write_layer(out, l);
                          for (const auto& l : m.decoder) write_layer(out, l);
                        }},
             model);
}

AutoencoderModel read_model(std::istream& in) {
  LineReader r(in);
  auto header = r.next();
  std::string kind;
  header >> kind;
  if (kind == "linear") {
    const Index d = read_positive(header, r, "ambient dimension");
    const Index p = read_positive(header, r, "latent dimension");
    Matrix v(d, p);
    for (Index i = 0; i < d; ++i) r.read_row(v.data() + i * p, p);
    return StiefelPoint(std::move(v));
  }
  if (kind == "mlp") {
    const Index ne = read_positive(header, r, "encoder layer count");
    const Index nd = read_positive(header, r, "decoder layer count");
    Mlp m;
    for (Index k = 0; k < ne; ++k) m.encoder.push_back(read_layer(r));
    for (Index k = 0; k < nd; ++k) m.decoder.push_back(read_layer(r));
    m.validate();
    return m;
  }
  fail(ErrorCode::Parse, "model: unknown model kind '" + kind + "'");
}

void save_model(const std::filesystem::path& path, const AutoencoderModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  write_model(out, model);
  if (!out) fail(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

AutoencoderModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace bdc
