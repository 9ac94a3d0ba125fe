#include "icopt/experiment.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "icopt/ic0.hpp"
#include "icopt/matrix_market.hpp"
#include "icopt/solver.hpp"

namespace icopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json train_to_json(const TrainConfig& t) {
  return {{"step_size", t.step_size}, {"batch_size", t.batch_size}, {"epochs", t.epochs},
          {"seed", t.seed},           {"diag_floor", t.diag_floor}};
}

void train_from_json(const json& j, TrainConfig& t) {
  t.step_size = j.value("step_size", t.step_size);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.epochs = j.value("epochs", t.epochs);
  t.seed = j.value("seed", t.seed);
  t.diag_floor = j.value("diag_floor", t.diag_floor);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string series_csv(const char* header, std::span<const double> values, std::size_t first_index = 0) {
  std::ostringstream out;
  out << header << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) out << i + first_index << ',' << fmt(values[i]) << '\n';
  return out.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
  }
  return out.str();
}

json probes_to_json(const ProbeSet& p) {
  json j = {{"seed", p.seed}, {"count", p.size()}, {"n", p.probes.front().size()}, {"probes", p.probes}};
  j["solutions"] = p.solutions ? json(*p.solutions) : json(nullptr);
  return j;
}

ProbeSet probes_from_json(const json& j) {
  ProbeSet p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.probes = j.at("probes").get<std::vector<Vector>>();
  if (!j.at("solutions").is_null()) p.solutions = j.at("solutions").get<std::vector<Vector>>();
  return p;
}

std::string factor_file(LossKind kind) { return "factor_" + std::string(to_string(kind)) + ".mtx"; }

}  // namespace

double default_system_scale(const GridSpec& grid, LossKind kind) {
  return kind == LossKind::weighted ? grid.h() : grid.h() * grid.h();
}

TrainConfig ExperimentConfig::train_config(LossKind kind) const {
  TrainConfig t = kind == LossKind::weighted ? weighted : unweighted;
  t.loss = kind;
  t.system_scale = system_scale.value_or(default_system_scale(grid_spec(), kind));
  return t;
}

void ExperimentConfig::validate() const {
  grid_spec().validate();
  if (probe_count < 1) throw std::invalid_argument("config: probe count must be >= 1");
  if (cg_rhs_probe >= probe_count) throw std::invalid_argument("config: cg rhs_probe out of range");
  if (histogram_bins < 1) throw std::invalid_argument("config: histogram bins must be >= 1");
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw std::invalid_argument("config: cg rel_tol must lie in (0, 1)");
  train_config(LossKind::unweighted).validate();
  train_config(LossKind::weighted).validate();
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"grid", c.grid},
           {"field", {{"seed", c.field_seed}, {"corr_len", c.corr_len}, {"target_contrast", c.target_contrast}}},
           {"probes", {{"count", c.probe_count}, {"seed", c.probe_seed}}},
           {"train", {{"unweighted", train_to_json(c.unweighted)}, {"weighted", train_to_json(c.weighted)}}},
           {"system_scale", c.system_scale ? json(*c.system_scale) : json(nullptr)},
           {"cg", {{"rel_tol", c.cg_tol}, {"rhs_probe", c.cg_rhs_probe}}},
           {"histogram", {{"bins", c.histogram_bins}, {"scale", std::string(to_string(c.histogram_scale))}}},
           {"output_dir", c.output_dir}};
}

void from_json(const json& j, ExperimentConfig& c) {
  c.grid = j.value("grid", c.grid);
  if (j.contains("field")) {
    const auto& f = j.at("field");
    c.field_seed = f.value("seed", c.field_seed);
    c.corr_len = f.value("corr_len", c.corr_len);
    c.target_contrast = f.value("target_contrast", c.target_contrast);
  }
  if (j.contains("probes")) {
    c.probe_count = j.at("probes").value("count", c.probe_count);
    c.probe_seed = j.at("probes").value("seed", c.probe_seed);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    if (t.contains("unweighted")) train_from_json(t.at("unweighted"), c.unweighted);
    if (t.contains("weighted")) train_from_json(t.at("weighted"), c.weighted);
  }
  if (j.contains("system_scale")) {
    const auto& s = j.at("system_scale");
    c.system_scale = s.is_null() ? std::nullopt : std::optional<double>(s.get<double>());
  }
  if (j.contains("cg")) {
    c.cg_tol = j.at("cg").value("rel_tol", c.cg_tol);
    c.cg_rhs_probe = j.at("cg").value("rhs_probe", c.cg_rhs_probe);
  }
  if (j.contains("histogram")) {
    c.histogram_bins = j.at("histogram").value("bins", c.histogram_bins);
    c.histogram_scale = histogram_scale_from_string(
        j.at("histogram").value("scale", std::string(to_string(c.histogram_scale))));
  }
  c.output_dir = j.value("output_dir", c.output_dir);
}

ExperimentConfig load_config(const fs::path& path) {
  ExperimentConfig c = read_json(path).get<ExperimentConfig>();
  c.validate();
  return c;
}

Problem build_problem(const ExperimentConfig& config) {
  config.validate();
  Problem p;
  p.grid = config.grid_spec();
  p.field = gaussian_random_field(p.grid, config.field_seed, config.corr_len, config.target_contrast);
  p.a = assemble_fvm(p.grid, p.field);
  p.probes = attach_solutions(p.a, sample_probes(p.a.n, config.probe_count, config.probe_seed));
  return p;
}

std::vector<MethodResult> evaluate_methods(const CsrMatrix& a,
                                           const std::vector<std::pair<std::string, const LowerFactor*>>& methods,
                                           std::span<const double> rhs, double cg_tol, std::size_t dense_limit) {
  std::vector<MethodResult> out;
  for (const auto& [label, factor] : methods) {
    MethodResult r;
    r.label = label;
    if (a.n <= dense_limit) {
      r.spectrum = factor ? precond_spectrum(a, *factor) : matrix_spectrum(a);
      r.kappa = condition_number(r.spectrum);
    }
    PcgResult cg = pcg(a, rhs, factor, {.rel_tol = cg_tol});
    r.cg_iterations = cg.iterations;
    r.cg_residuals = std::move(cg.residual_history);
    out.push_back(std::move(r));
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest initialization failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

Manifest Manifest::load(const fs::path& dir) {
  const json j = read_json(dir / "manifest.json");
  Manifest m;
  m.dir_ = dir;
  m.config_ = j.at("config").get<ExperimentConfig>();
  m.files_ = j.at("files").get<std::map<std::string, std::string>>();
  return m;
}

Manifest Manifest::create(const fs::path& dir, const ExperimentConfig& config) {
  Manifest m;
  m.dir_ = dir;
  m.config_ = config;
  return m;
}

void Manifest::verify() const {
  for (const auto& [name, digest] : files_) {
    const fs::path path = dir_ / name;
    if (!fs::exists(path)) throw std::runtime_error("artifact " + name + " listed in the manifest is missing");
    if (sha256_file(path) != digest) {
      throw std::runtime_error("artifact " + name + " does not match its manifest checksum");
    }
  }
}

void Manifest::require(const std::string& name) const {
  if (!files_.contains(name)) throw std::runtime_error("run directory has no " + name + " yet");
}

void Manifest::record(const std::string& name) { files_[name] = sha256_file(dir_ / name); }

void Manifest::save() const {
  json j;
  j["config"] = config_;
  j["seeds"] = {{"field", config_.field_seed},
                {"probes", config_.probe_seed},
                {"train_unweighted", config_.unweighted.seed},
                {"train_weighted", config_.weighted.seed}};
  j["files"] = files_;
  write_json(dir_ / "manifest.json", j);
}

std::vector<std::string> cmd_generate(const ExperimentConfig& config) {
  const Problem p = build_problem(config);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);

  write_json(dir / "config.json", config);
  write_matrix_market(dir / "A.mtx", p.a);
  write_json(dir / "coefficient.json", {{"nx", p.field.nx},
                                         {"ny", p.field.ny},
                                         {"seed", config.field_seed},
                                         {"corr_len", config.corr_len},
                                         {"target_contrast", config.target_contrast},
                                         {"contrast", p.field.contrast()},
                                         {"k", p.field.k}});
  write_json(dir / "probes.json", probes_to_json(p.probes));

  Manifest m = Manifest::create(dir, config);
  const std::vector<std::string> written{"config.json", "A.mtx", "coefficient.json", "probes.json"};
  for (const auto& name : written) m.record(name);
  m.save();
  return written;
}

std::vector<std::string> cmd_train(const fs::path& dir, LossKind kind) {
  Manifest m = Manifest::load(dir);
  m.verify();
  m.require("A.mtx");
  m.require("probes.json");
  const ExperimentConfig& config = m.config();
  const CsrMatrix a = read_matrix_market(dir / "A.mtx");
  const ProbeSet probes = probes_from_json(read_json(dir / "probes.json"));
  const TrainConfig tc = config.train_config(kind);
  if (kind == LossKind::weighted && !probes.has_solutions()) {
    throw std::runtime_error("weighted training needs probe solutions, but probes.json has none");
  }

  const LowerFactor l0 = ic0_factorize(a);
  const TrainReport report = train(a, l0, probes, tc);

  const std::string tag(to_string(kind));
  const std::vector<std::string> written{"ic0.mtx", factor_file(kind), "train_" + tag + ".json",
                                         "loss_" + tag + ".csv"};
  write_matrix_market(dir / written[0], l0);
  write_matrix_market(dir / written[1], report.factor);
  write_json(dir / written[2], {{"loss", tag},
                                {"seed", report.seed},
                                {"epochs", report.epochs},
                                {"step_size", tc.step_size},
                                {"batch_size", tc.batch_size},
                                {"diag_floor", tc.diag_floor},
                                {"system_scale", tc.system_scale},
                                {"floor_activations", report.floor_activations},
                                {"initial_loss", report.initial_loss},
                                {"history", report.history}});
  write_text(dir / written[3], series_csv("epoch,normalized_loss", report.history));
  for (const auto& name : written) m.record(name);
  m.save();
  return written;
}

std::vector<std::string> cmd_solve(const fs::path& dir, const std::string& factor, std::size_t probe_index) {
  Manifest m = Manifest::load(dir);
  m.verify();
  const CsrMatrix a = read_matrix_market(dir / "A.mtx");
  const ProbeSet probes = probes_from_json(read_json(dir / "probes.json"));
  if (probe_index >= probes.size()) throw std::invalid_argument("probe index out of range");

  std::optional<LowerFactor> l;
  if (factor == "ic0") {
    m.require("ic0.mtx");
    l = read_lower_factor(dir / "ic0.mtx");
  } else if (factor == "unweighted" || factor == "weighted") {
    const std::string file = factor_file(loss_kind_from_string(factor));
    m.require(file);
    l = read_lower_factor(dir / file);
  } else if (factor != "none") {
    throw std::invalid_argument("unknown factor '" + factor + "' (none, ic0, unweighted, weighted)");
  }
  const PcgResult res = pcg(a, probes.probes[probe_index], l ? &*l : nullptr, {.rel_tol = m.config().cg_tol});
  const std::string name = "solve_" + factor + "_" + std::to_string(probe_index) + ".csv";
  write_text(dir / name, series_csv("iteration,rel_residual", res.residual_history));
  m.record(name);
  m.save();
  return {name};
}

std::vector<std::string> cmd_report(const fs::path& dir) {
  Manifest m = Manifest::load(dir);
  m.verify();
  for (const char* name : {"A.mtx", "probes.json", "ic0.mtx", "factor_unweighted.mtx", "factor_weighted.mtx",
                           "train_unweighted.json", "train_weighted.json"}) {
    m.require(name);
  }
  const ExperimentConfig& config = m.config();
  const CsrMatrix a = read_matrix_market(dir / "A.mtx");
  const ProbeSet probes = probes_from_json(read_json(dir / "probes.json"));
  const LowerFactor ic0 = read_lower_factor(dir / "ic0.mtx");
  const LowerFactor unweighted = read_lower_factor(dir / "factor_unweighted.mtx");
  const LowerFactor weighted = read_lower_factor(dir / "factor_weighted.mtx");

  // Table column order.
  const auto results = evaluate_methods(
      a, {{"A", nullptr}, {"Frobenius", &unweighted}, {"Weighted Frobenius", &weighted}, {"IC(0)", &ic0}},
      probes.probes[config.cg_rhs_probe], config.cg_tol);
  const std::map<std::string, std::string> slug{
      {"A", "none"}, {"Frobenius", "unweighted"}, {"Weighted Frobenius", "weighted"}, {"IC(0)", "ic0"}};

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    written.push_back(name);
  };

  std::ostringstream table;
  table << "metric";
  for (const auto& col : kTableColumns) table << ',' << col;
  table << "\nkappa";
  for (const auto& r : results) table << ',' << (r.kappa ? fmt(*r.kappa) : std::string("n/a"));
  table << "\ncg_iterations";
  for (const auto& r : results) table << ',' << r.cg_iterations;
  table << '\n';
  emit("table1.csv", table.str());

  json meta = {{"histogram", {{"bins", config.histogram_bins}, {"scale", std::string(to_string(config.histogram_scale))}}},
               {"cg", {{"rel_tol", config.cg_tol}, {"rhs_probe", config.cg_rhs_probe}}},
               {"n", a.n}};
  for (const auto& r : results) {
    const std::string s = slug.at(r.label);
    meta["methods"][s] = {{"label", r.label},
                          {"kappa", r.kappa ? json(*r.kappa) : json("n/a")},
                          {"cg_iterations", r.cg_iterations}};
    emit("cg_" + s + ".csv", series_csv("iteration,rel_residual", r.cg_residuals));
    if (r.kappa) {
      emit("spectrum_" + s + ".csv", series_csv("index,eigenvalue", r.spectrum));
      const Histogram h = eigen_histogram(r.spectrum, config.histogram_bins, config.histogram_scale);
      emit("hist_" + s + ".csv", histogram_csv(h));
    }
  }

  const auto hist_u = read_json(dir / "train_unweighted.json").at("history").get<Vector>();
  const auto hist_w = read_json(dir / "train_weighted.json").at("history").get<Vector>();
  std::ostringstream loss;
  loss << "epoch,unweighted,weighted\n";
  for (std::size_t e = 0; e < std::max(hist_u.size(), hist_w.size()); ++e) {
    loss << e << ',' << (e < hist_u.size() ? fmt(hist_u[e]) : "") << ',' << (e < hist_w.size() ? fmt(hist_w[e]) : "")
         << '\n';
  }
  emit("loss_history.csv", loss.str());
  write_json(dir / "report.json", meta);
  written.push_back("report.json");

  for (const auto& name : written) m.record(name);
  m.save();
  return written;
}

}  // namespace icopt
