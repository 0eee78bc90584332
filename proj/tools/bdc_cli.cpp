// bdc: command-line driver for generation, autoencoder training, compression
// and evaluation. Talks to the library only through bdc.h.

#include <bdc/bdc.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  bdc_status status;
  ApiError(bdc_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(bdc_status s, const char* what) {
  if (s != BDC_OK) throw ApiError(s, std::string(what) + ": " + bdc_last_error());
}

struct Free {
  void operator()(bdc_matrix* p) const { bdc_matrix_free(p); }
  void operator()(bdc_kernel* p) const { bdc_kernel_free(p); }
  void operator()(bdc_model* p) const { bdc_model_free(p); }
  void operator()(bdc_mixture* p) const { bdc_mixture_free(p); }
};
using Matrix = std::unique_ptr<bdc_matrix, Free>;
using Kernel = std::unique_ptr<bdc_kernel, Free>;
using Model = std::unique_ptr<bdc_model, Free>;
using Mixture = std::unique_ptr<bdc_mixture, Free>;

template <class T>
struct Out {
  T* raw = nullptr;
  operator T**() { return &raw; }
  std::unique_ptr<T, Free> take() { return std::unique_ptr<T, Free>(raw); }
};

std::string fmt(double v) {
  // Same shortest representation the library writes.
  return json(v).dump();
}

// ---- run manifest ----

class Manifest {
 public:
  Manifest(std::string subcommand, std::vector<std::string> argv)
      : subcommand_(std::move(subcommand)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void set(const std::string& key, double value) { set(key, fmt(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

  void write(const fs::path& dir) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    if (!out) throw ApiError(BDC_ERR_IO, "cannot write manifest in '" + dir.string() + "'");
    out << "subcommand=" << subcommand_ << '\n';
    out << "version=" << bdc_version() << '\n';
    out << "argv=" << json(argv_).dump() << '\n';
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    out << "duration_seconds=" << fmt(secs) << '\n';
  }

 private:
  std::string subcommand_;
  std::vector<std::string> argv_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::chrono::steady_clock::time_point start_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ApiError(BDC_ERR_IO, "cannot create '" + dir.string() + "': " + ec.message());
}

std::ofstream open_log(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ApiError(BDC_ERR_IO, "cannot open '" + path.string() + "' for writing");
  return out;
}

// ---- kernel specs: name[:lengthscale|:median] ----

struct KernelSpec {
  std::string name;
  std::optional<double> lengthscale;  // unset means median heuristic
};

KernelSpec parse_kernel_spec(const std::string& text) {
  const auto colon = text.find(':');
  KernelSpec spec{text.substr(0, colon), std::nullopt};
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (spec.name == "quadratic") {
    if (colon != std::string::npos) throw UsageError("kernel 'quadratic' takes no parameter");
    return spec;
  }
  if (spec.name != "gaussian" && spec.name != "imq") throw UsageError("unknown kernel '" + spec.name + "'");
  if (colon == std::string::npos || arg == "median") return spec;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != arg.size() || !(v > 0.0)) throw UsageError("bad lengthscale in kernel spec '" + text + "'");
  spec.lengthscale = v;
  return spec;
}

struct ResolvedKernel {
  Kernel kernel;
  std::string description;  // e.g. gaussian:1.25
};

ResolvedKernel make_kernel(const KernelSpec& spec, const bdc_matrix* space) {
  Out<bdc_kernel> k;
  if (spec.name == "quadratic") {
    check(bdc_kernel_quadratic(k), "kernel");
    return {k.take(), "quadratic"};
  }
  double ls = 0.0;
  if (spec.lengthscale) {
    ls = *spec.lengthscale;
  } else {
    check(bdc_median_heuristic(space, 1000, 0, &ls), "median heuristic");
  }
  if (spec.name == "gaussian")
    check(bdc_kernel_gaussian(ls, k), "kernel");
  else
    check(bdc_kernel_imq(ls, k), "kernel");
  return {k.take(), spec.name + ":" + fmt(ls)};
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  if (text.empty()) return widths;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("malformed --hidden '" + text + "'");
    const auto w = std::stoull(tok);
    if (w == 0) throw UsageError("hidden widths must be positive");
    widths.push_back(static_cast<std::size_t>(w));
  }
  if (text.back() == ',') throw UsageError("malformed --hidden '" + text + "'");
  return widths;
}

// ---- datasets: feature columns followed by responses named y0..y{q-1} ----

struct Dataset {
  Matrix features;
  Matrix responses;  // null when the file has no y columns
};

Dataset read_dataset(const fs::path& path, const char* feature_prefix = nullptr) {
  Out<bdc_matrix> all;
  char* header_raw = nullptr;
  check(bdc_csv_load(path.string().c_str(), all, &header_raw), "load data");
  Matrix table = all.take();
  const std::string header = header_raw;
  bdc_string_free(header_raw);

  std::vector<std::string> names;
  if (!header.empty()) {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) names.push_back(tok);
  }
  const std::size_t cols = bdc_matrix_cols(table.get());
  std::size_t features = cols;
  auto is_response = [](const std::string& n) {
    return n.size() > 1 && n[0] == 'y' && n.find_first_not_of("0123456789", 1) == std::string::npos;
  };
  while (features > 0 && features <= names.size() && is_response(names[features - 1])) --features;
  if (feature_prefix)
    for (std::size_t j = 0; j < features && j < names.size(); ++j)
      if (names[j].rfind(feature_prefix, 0) != 0)
        throw ApiError(BDC_ERR_PARSE, path.string() + ": unexpected column '" + names[j] + "'");

  Dataset ds;
  Out<bdc_matrix> f;
  check(bdc_matrix_columns(table.get(), 0, features, f), "split columns");
  ds.features = f.take();
  if (features < cols) {
    Out<bdc_matrix> r;
    check(bdc_matrix_columns(table.get(), features, cols - features, r), "split columns");
    ds.responses = r.take();
  }
  return ds;
}

std::string header_for(const char* prefix, std::size_t count) {
  std::string h;
  for (std::size_t j = 0; j < count; ++j) h += (j ? "," : "") + std::string(prefix) + std::to_string(j);
  return h;
}

Model load_model(const fs::path& path) {
  Out<bdc_model> m;
  check(bdc_model_load(path.string().c_str(), m), "load model");
  return m.take();
}

Matrix encode(const bdc_model* model, const bdc_matrix* x) {
  Out<bdc_matrix> z;
  check(bdc_model_encode(model, x, z), "encode");
  return z.take();
}

// ---- subcommands ----

struct GenerateArgs {
  std::string dataset;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t ambient_dim = 0;
  std::string projection = "linear";
  std::optional<std::uint64_t> projection_seed;
  std::size_t tanh_hidden = 64;
  double response_noise = 0.5;
  std::string out;
};

void cmd_generate(const GenerateArgs& a, Manifest& man) {
  const fs::path dir(a.out);
  ensure_dir(dir);
  const std::uint64_t proj_seed = a.projection_seed.value_or(a.seed + 1);
  man.set("config.dataset", a.dataset);
  man.set("config.n", static_cast<std::uint64_t>(a.n));
  man.set("seed", a.seed);
  man.set("config.ambient_dim", static_cast<std::uint64_t>(a.ambient_dim));
  man.set("config.projection", a.ambient_dim ? a.projection : "none");
  man.set("config.projection_seed", proj_seed);
  man.set("config.tanh_hidden", static_cast<std::uint64_t>(a.tanh_hidden));

  Matrix x, y;
  Mixture mixture;
  if (a.dataset == "gaussian-mixture") {
    Out<bdc_matrix> pts;
    Out<bdc_mixture> gm;
    check(bdc_generate_gaussian_mixture(a.n, a.seed, pts, gm), "generate");
    x = pts.take();
    mixture = gm.take();
  } else {
    Out<bdc_matrix> pts, resp;
    check(bdc_generate_swiss_roll(a.n, a.seed, a.response_noise, pts, resp), "generate");
    x = pts.take();
    y = resp.take();
    man.set("config.response_noise", a.response_noise);
  }

  if (a.ambient_dim) {
    Out<bdc_matrix> projected;
    if (a.projection == "linear") {
      Out<bdc_matrix> p;
      check(bdc_project_random_gaussian(x.get(), a.ambient_dim, proj_seed, projected, p), "project");
      Matrix pm = p.take();
      check(bdc_csv_save((dir / "projection.csv").string().c_str(), pm.get(), nullptr), "save projection");
      man.set("output.projection", (dir / "projection.csv").string());
      if (mixture) {
        Out<bdc_mixture> pushed;
        check(bdc_mixture_pushforward(mixture.get(), pm.get(), pushed), "pushforward");
        mixture = pushed.take();
      }
    } else {
      check(bdc_project_random_tanh(x.get(), a.ambient_dim, a.tanh_hidden, proj_seed, projected), "project");
      mixture.reset();
    }
    x = projected.take();
  }

  const std::size_t d = bdc_matrix_cols(x.get());
  std::string header = header_for("x", d);
  Matrix table;
  if (y) {
    Out<bdc_matrix> joined;
    check(bdc_matrix_hconcat(x.get(), y.get(), joined), "join");
    table = joined.take();
    header += ",y0";
  } else {
    table = std::move(x);
  }
  check(bdc_csv_save((dir / "data.csv").string().c_str(), table.get(), header.c_str()), "save data");
  man.set("output.data", (dir / "data.csv").string());
  if (mixture) {
    check(bdc_mixture_save((dir / "mixture.txt").string().c_str(), mixture.get()), "save mixture");
    man.set("output.mixture", (dir / "mixture.txt").string());
  }
}

struct TrainArgs {
  std::string data;
  std::string arch = "linear";
  std::size_t latent_dim = 0;
  std::size_t epochs = 10;
  std::size_t batch = 64;
  double lr = 1e-2;
  std::string kernel = "gaussian:median";
  std::string response_kernel = "gaussian:median";
  std::uint64_t seed = 0;
  std::string init = "pca";
  std::string hidden = "64";
  bool labelled = false;
  std::string out;
};

void cmd_train(const TrainArgs& a, Manifest& man) {
  const auto spec = parse_kernel_spec(a.kernel);
  const auto rspec = parse_kernel_spec(a.response_kernel);
  const auto widths = a.arch == "mlp" ? parse_widths(a.hidden) : std::vector<std::size_t>{};
  const fs::path dir(a.out);

  Dataset ds = read_dataset(a.data);
  if (a.labelled && !ds.responses) throw ApiError(BDC_ERR_PARSE, "--labelled needs y columns in " + a.data);
  ensure_dir(dir);
  auto k = make_kernel(spec, ds.features.get());
  std::optional<ResolvedKernel> rk;
  if (a.labelled) rk = make_kernel(rspec, ds.responses.get());

  man.set("input.data", a.data);
  man.set("seed", a.seed);
  man.set("config.arch", a.arch);
  man.set("config.latent_dim", static_cast<std::uint64_t>(a.latent_dim));
  man.set("config.epochs", static_cast<std::uint64_t>(a.epochs));
  man.set("config.batch", static_cast<std::uint64_t>(a.batch));
  man.set("config.lr", a.lr);
  man.set("config.kernel", k.description);
  man.set("config.labelled", a.labelled ? "true" : "false");
  if (rk) man.set("config.response_kernel", rk->description);
  if (a.arch == "linear") man.set("config.init", a.init);
  if (a.arch == "mlp") man.set("config.hidden", a.hidden);

  bdc_train_config cfg = bdc_train_config_default();
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  man.set("config.adam_beta1", cfg.beta1);
  man.set("config.adam_beta2", cfg.beta2);
  man.set("config.adam_eps", cfg.eps);

  auto log = open_log(dir / "train_log.jsonl");
  auto on_epoch = [](void* user, size_t epoch, double loss) {
    *static_cast<std::ofstream*>(user) << json{{"epoch", epoch}, {"loss", loss}}.dump() << '\n';
  };
  const bdc_matrix* resp = a.labelled ? ds.responses.get() : nullptr;
  const bdc_kernel* resp_k = rk ? rk->kernel.get() : nullptr;
  Out<bdc_model> model;
  if (a.arch == "linear") {
    const auto init = a.init == "pca" ? BDC_INIT_PCA : BDC_INIT_GAUSSIAN;
    check(bdc_train_linear(ds.features.get(), a.latent_dim, k.kernel.get(), &cfg, init, resp, resp_k, on_epoch, &log,
                           model),
          "train");
  } else {
    check(bdc_train_mlp(ds.features.get(), widths.data(), widths.size(), a.latent_dim, k.kernel.get(), &cfg, resp,
                        resp_k, on_epoch, &log, model),
          "train");
  }
  Model m = model.take();
  check(bdc_model_save((dir / "model.txt").string().c_str(), m.get()), "save model");
  man.set("output.model", (dir / "model.txt").string());
  man.set("output.log", (dir / "train_log.jsonl").string());
}

struct CompressArgs {
  std::string model;
  std::string data;
  std::size_t m = 100;
  std::size_t candidates = 10;
  std::size_t max_steps = 1000;
  double lr = 1e-2;
  double grad_tol = 1e-8;
  std::string kernel = "gaussian:median";
  std::string response_kernel = "gaussian:median";
  std::uint64_t seed = 0;
  bool labelled = false;
  std::string response_mode = "continuous";
  std::string out;
};

void cmd_compress(const CompressArgs& a, Manifest& man) {
  const auto spec = parse_kernel_spec(a.kernel);
  const auto rspec = parse_kernel_spec(a.response_kernel);
  const fs::path dir(a.out);

  Model model = load_model(a.model);
  Dataset ds = read_dataset(a.data);
  if (a.labelled && !ds.responses) throw ApiError(BDC_ERR_PARSE, "--labelled needs y columns in " + a.data);
  Matrix z = encode(model.get(), ds.features.get());
  ensure_dir(dir);
  auto k = make_kernel(spec, z.get());

  bdc_compress_config cfg = bdc_compress_config_default();
  cfg.m = a.m;
  cfg.candidates = a.candidates;
  cfg.max_steps = a.max_steps;
  cfg.learning_rate = a.lr;
  cfg.grad_tol = a.grad_tol;
  cfg.seed = a.seed;

  man.set("input.model", a.model);
  man.set("input.data", a.data);
  man.set("seed", a.seed);
  man.set("config.m", static_cast<std::uint64_t>(a.m));
  man.set("config.candidates", static_cast<std::uint64_t>(a.candidates));
  man.set("config.max_steps", static_cast<std::uint64_t>(a.max_steps));
  man.set("config.lr", a.lr);
  man.set("config.grad_tol", a.grad_tol);
  man.set("config.kernel", k.description);
  man.set("config.labelled", a.labelled ? "true" : "false");
  man.set("config.adam_beta1", cfg.beta1);
  man.set("config.adam_beta2", cfg.beta2);
  man.set("config.adam_eps", cfg.eps);

  auto log = open_log(dir / "descent_log.jsonl");
  auto on_step = [](void* user, size_t step, double obj, double gnorm) {
    *static_cast<std::ofstream*>(user) << json{{"step", step}, {"emmd_sq", obj}, {"grad_norm", gnorm}}.dump()
                                       << '\n';
  };

  const std::size_t p = bdc_matrix_cols(z.get());
  Matrix table;
  std::string header = header_for("z", p);
  if (a.labelled) {
    auto rk = make_kernel(rspec, ds.responses.get());
    man.set("config.response_kernel", rk.description);
    man.set("config.response_mode", a.response_mode);
    const auto mode = a.response_mode == "one-hot" ? BDC_RESPONSES_ONE_HOT : BDC_RESPONSES_CONTINUOUS;
    Out<bdc_matrix> lat, resp;
    check(bdc_compress_joint(z.get(), ds.responses.get(), &cfg, k.kernel.get(), rk.kernel.get(), mode, on_step, &log,
                             lat, resp),
          "compress");
    Matrix l = lat.take(), r = resp.take();
    Out<bdc_matrix> joined;
    check(bdc_matrix_hconcat(l.get(), r.get(), joined), "join");
    table = joined.take();
    header += "," + header_for("y", bdc_matrix_cols(r.get()));
  } else {
    Out<bdc_matrix> lat;
    check(bdc_compress(z.get(), &cfg, k.kernel.get(), on_step, &log, lat), "compress");
    table = lat.take();
  }
  check(bdc_csv_save((dir / "compressed.csv").string().c_str(), table.get(), header.c_str()), "save");
  man.set("output.compressed", (dir / "compressed.csv").string());
  man.set("output.log", (dir / "descent_log.jsonl").string());
}

struct EvaluateArgs {
  std::string data;
  std::string model;
  std::string compressed;
  std::string kernel = "gaussian:median";
  std::string latent_kernel = "gaussian:median";
  bool pullback = false;
  std::string exact_mixture;
  std::string out;
};

void cmd_evaluate(const EvaluateArgs& a, Manifest& man) {
  const auto spec = parse_kernel_spec(a.kernel);
  const auto lspec = parse_kernel_spec(a.latent_kernel);
  const fs::path dir(a.out);

  Model model = load_model(a.model);
  Dataset ds = read_dataset(a.data);
  Dataset cs = read_dataset(a.compressed, "z");
  if (bdc_matrix_cols(cs.features.get()) != bdc_model_latent_dim(model.get()))
    throw ApiError(BDC_ERR_INVALID_ARGUMENT, "compressed set does not match the model's latent dimension");
  ensure_dir(dir);

  auto k = make_kernel(spec, ds.features.get());
  ResolvedKernel lk;
  if (a.pullback) {
    Out<bdc_kernel> pk;
    check(bdc_kernel_pullback(k.kernel.get(), model.get(), pk), "pull-back kernel");
    lk = {pk.take(), "pullback(" + k.description + ")"};
  } else {
    Matrix z = encode(model.get(), ds.features.get());
    lk = make_kernel(lspec, z.get());
  }

  bdc_report r{};
  check(bdc_evaluate(ds.features.get(), model.get(), cs.features.get(), k.kernel.get(), lk.kernel.get(), &r),
        "evaluate");

  json report = {{"rmmd_sq", r.rmmd_sq},
                 {"emmd_sq", r.emmd_sq},
                 {"dmmd_sq", r.dmmd_sq},
                 {"bound", r.bound},
                 {"bound_satisfied", r.bound_satisfied != 0},
                 {"pullback", r.pullback != 0},
                 {"kernel", k.description},
                 {"latent_kernel", lk.description}};
  if (!a.exact_mixture.empty()) {
    Out<bdc_mixture> gm;
    check(bdc_mixture_load(a.exact_mixture.c_str(), gm), "load mixture");
    Mixture mix = gm.take();
    double ls = 0.0;
    if (spec.name != "gaussian") throw UsageError("--exact-mixture needs a gaussian ambient kernel");
    check(bdc_kernel_lengthscale(k.kernel.get(), &ls), "lengthscale");
    Out<bdc_matrix> decoded;
    check(bdc_model_decode(model.get(), cs.features.get(), decoded), "decode");
    Matrix dec = decoded.take();
    double exact = 0.0;
    check(bdc_exact_mmd_sq_vs_points(mix.get(), dec.get(), ls, &exact), "exact mmd");
    report["exact_mmd_sq"] = exact;
    man.set("input.exact_mixture", a.exact_mixture);
  }

  std::ofstream out(dir / "report.json", std::ios::binary);
  if (!out) throw ApiError(BDC_ERR_IO, "cannot write report in '" + dir.string() + "'");
  out << report.dump(2) << '\n';

  man.set("input.data", a.data);
  man.set("input.model", a.model);
  man.set("input.compressed", a.compressed);
  man.set("seed", std::uint64_t{0});
  man.set("config.kernel", k.description);
  man.set("config.latent_kernel", lk.description);
  man.set("config.pullback", a.pullback ? "true" : "false");
  man.set("output.report", (dir / "report.json").string());
}

std::vector<std::string> manifest_argv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiError(BDC_ERR_IO, "cannot open '" + path.string() + "'");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("argv=", 0) == 0) {
      try {
        return json::parse(line.substr(5)).get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw ApiError(BDC_ERR_PARSE, path.string() + ": bad argv line: " + e.what());
      }
    }
  throw ApiError(BDC_ERR_PARSE, path.string() + ": no argv entry");
}

int run(std::vector<std::string> args, int depth = 0) {
  CLI::App app{"Compress a dataset into a small latent set through an autoencoder"};
  app.name("bdc");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bdc_version()));

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a synthetic dataset");
  g->add_option("--dataset", gen.dataset)->required()->check(CLI::IsMember({"gaussian-mixture", "swiss-roll"}));
  g->add_option("--n", gen.n)->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--ambient-dim", gen.ambient_dim, "Project features to this dimension");
  g->add_option("--projection", gen.projection)->check(CLI::IsMember({"linear", "tanh"}));
  g->add_option("--projection-seed", gen.projection_seed, "Defaults to seed + 1");
  g->add_option("--tanh-hidden", gen.tanh_hidden)->check(CLI::PositiveNumber);
  g->add_option("--response-noise", gen.response_noise)->check(CLI::NonNegativeNumber);
  g->add_option("--out", gen.out)->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train-ae", "Train a linear or MLP autoencoder");
  t->add_option("--data", tr.data)->required();
  t->add_option("--arch", tr.arch)->check(CLI::IsMember({"linear", "mlp"}));
  t->add_option("--latent-dim", tr.latent_dim)->required()->check(CLI::PositiveNumber);
  t->add_option("--epochs", tr.epochs);
  t->add_option("--batch", tr.batch)->check(CLI::PositiveNumber);
  t->add_option("--lr", tr.lr)->check(CLI::PositiveNumber);
  t->add_option("--kernel", tr.kernel);
  t->add_option("--response-kernel", tr.response_kernel);
  t->add_option("--seed", tr.seed);
  t->add_option("--init", tr.init)->check(CLI::IsMember({"pca", "gaussian"}));
  t->add_option("--hidden", tr.hidden, "Comma-separated hidden widths");
  t->add_flag("--labelled", tr.labelled);
  t->add_option("--out", tr.out)->required();

  CompressArgs cp;
  auto* c = app.add_subcommand("compress", "Optimize a latent compressed set");
  c->add_option("--model", cp.model)->required();
  c->add_option("--data", cp.data)->required();
  c->add_option("--m", cp.m)->check(CLI::PositiveNumber);
  c->add_option("--candidates", cp.candidates)->check(CLI::PositiveNumber);
  c->add_option("--max-steps", cp.max_steps);
  c->add_option("--lr", cp.lr)->check(CLI::PositiveNumber);
  c->add_option("--grad-tol", cp.grad_tol)->check(CLI::NonNegativeNumber);
  c->add_option("--kernel", cp.kernel);
  c->add_option("--response-kernel", cp.response_kernel);
  c->add_option("--seed", cp.seed);
  c->add_flag("--labelled", cp.labelled);
  c->add_option("--response-mode", cp.response_mode)->check(CLI::IsMember({"continuous", "one-hot"}));
  c->add_option("--out", cp.out)->required();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score a compressed set");
  e->add_option("--data", ev.data)->required();
  e->add_option("--model", ev.model)->required();
  e->add_option("--compressed", ev.compressed)->required();
  e->add_option("--kernel", ev.kernel);
  e->add_option("--latent-kernel", ev.latent_kernel);
  e->add_flag("--pullback", ev.pullback, "Use the decoder's pull-back kernel in latent space");
  e->add_option("--exact-mixture", ev.exact_mixture, "Mixture file for exact population scoring");
  e->add_option("--out", ev.out)->required();

  std::string manifest_path, rerun_out;
  auto* rr = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
  rr->add_option("--manifest", manifest_path)->required();
  rr->add_option("--out", rerun_out, "Write to this directory instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (rr->parsed()) {
      if (depth > 0) throw UsageError("a manifest cannot replay 'rerun'");
      auto argv = manifest_argv(manifest_path);
      if (!rerun_out.empty()) {
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < argv.size(); ++i)
          if (argv[i] == "--out") {
            argv[i + 1] = rerun_out;
            replaced = true;
          }
        if (!replaced) throw UsageError("manifest argv has no --out");
      }
      return run(argv, depth + 1);
    }
    const auto* sub = app.get_subcommands().front();
    Manifest man(sub->get_name(), args);
    std::string out_dir;
    if (g->parsed()) {
      cmd_generate(gen, man);
      out_dir = gen.out;
    } else if (t->parsed()) {
      cmd_train(tr, man);
      out_dir = tr.out;
    } else if (c->parsed()) {
      cmd_compress(cp, man);
      out_dir = cp.out;
    } else {
      cmd_evaluate(ev, man);
      out_dir = ev.out;
    }
    man.set("output.dir", out_dir);
    man.write(out_dir);
    return 0;
  } catch (const UsageError& err) {
    std::cerr << "bdc: " << err.what() << '\n';
    return 2;
  } catch (const ApiError& err) {
    std::cerr << "bdc: " << err.what() << '\n';
    return err.status == BDC_ERR_INVALID_ARGUMENT ? 2 : 1;
  } catch (const std::exception& err) {
    std::cerr << "bdc: " << err.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}
