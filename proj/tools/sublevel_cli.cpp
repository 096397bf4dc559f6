// Copyright 2026 The sublevel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Talks to the library only through the C API.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sublevel/sublevel.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

// Thrown for any failed library call or config check; reported on stderr as
// a one-line JSON object.
struct CliError {
  std::string code;
  std::string message;
};

void check(sl_status st) {
  if (st != SL_OK) throw CliError{sl_status_name(st), sl_last_error()};
}

[[noreturn]] void reject(const std::string& message) {
  throw CliError{"invalid_config", message};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Network = std::unique_ptr<sl_network, Deleter<sl_network, sl_network_free>>;
using Dataset = std::unique_ptr<sl_dataset, Deleter<sl_dataset, sl_dataset_free>>;
using Params = std::unique_ptr<sl_params, Deleter<sl_params, sl_params_free>>;
using Path = std::unique_ptr<sl_path, Deleter<sl_path, sl_path_free>>;
using Report = std::unique_ptr<sl_report, Deleter<sl_report, sl_report_free>>;
using Certificate =
    std::unique_ptr<sl_certificate, Deleter<sl_certificate, sl_certificate_free>>;

std::string take(char* s) {
  std::string out(s);
  sl_string_free(s);
  return out;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

// Flat JSON object with pre-rendered values.
class Summary {
 public:
  Summary& add(const std::string& key, const std::string& rendered) {
    fields_.emplace_back(key, rendered);
    return *this;
  }
  Summary& num(const std::string& key, double v) { return add(key, fmt(v)); }
  Summary& integer(const std::string& key, long long v) {
    return add(key, std::to_string(v));
  }
  Summary& flag(const std::string& key, bool v) { return add(key, v ? "true" : "false"); }
  Summary& str(const std::string& key, const std::string& v) { return add(key, quote(v)); }

  std::string render(int indent = 0) const {
    std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    std::string out = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      out += (i ? ",\n" : "\n") + pad + quote(fields_[i].first) + ": " +
             fields_[i].second;
    }
    out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

void write_file(const fs::path& file, const std::string& text) {
  std::FILE* f = std::fopen(file.c_str(), "wb");
  if (f == nullptr) throw CliError{"io", "cannot write '" + file.string() + "'"};
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

struct Config {
  std::vector<int64_t> widths;
  double slope = 0.5;
  std::string loss = "square";
  int64_t data_n = 4;
  int64_t data_n0 = 0;  // 0: widths[0], or 1 for certify
  std::optional<uint64_t> data_seed;
  std::string data_file;
  std::string alpha = "max";
  int steps = 5000;
  double lr = 0.05;
  std::optional<uint64_t> seed_a;
  std::optional<uint64_t> seed_b;
  double inv_tol = 1e-8;
  double verify_tol = 1e-6;
  double rank_tol_rel = 1e-10;
  double feas_tol = 1e-8;
  int max_retries = 10;
  int max_seed_retries = 10;
  int barrier_samples = 400;
  uint64_t seed = 0;
  std::string out = "out";
  int samples = 200;

  fs::path out_file(const std::string& name) const { return fs::path(out) / name; }

  void validate_common() const {
    if (!(inv_tol > 0 && verify_tol > 0 && rank_tol_rel > 0 && feas_tol > 0)) {
      reject("tolerances must be positive");
    }
    if (samples < 2) reject("samples must be >= 2");
    if (!(slope > 0 && slope < 1)) reject("slope must lie in (0, 1)");
  }

  std::optional<double> explicit_alpha() const {
    if (alpha == "max") return std::nullopt;
    try {
      std::size_t used = 0;
      double v = std::stod(alpha, &used);
      if (used != alpha.size()) throw std::invalid_argument(alpha);
      return v;
    } catch (const std::exception&) {
      reject("alpha must be 'max' or a number, got '" + alpha + "'");
    }
  }

  sl_connect_options connect_options() const {
    sl_connect_options o = sl_connect_options_default();
    o.seed = seed;
    o.max_retries = max_retries;
    o.rank_tol_rel = rank_tol_rel;
    o.feas_tol = feas_tol;
    o.inv_tol = inv_tol;
    o.verify_tol = verify_tol;
    o.verify_samples = samples;
    return o;
  }

  sl_verify_options verify_options() const {
    sl_verify_options o = sl_verify_options_default();
    o.samples_per_segment = samples;
    o.verify_tol = verify_tol;
    o.inv_tol = inv_tol;
    return o;
  }
};

void ensure_out_dir(const Config& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw CliError{"io", "cannot create '" + c.out + "': " + ec.message()};
}

Network load_network(const fs::path& p) {
  sl_network* n = nullptr;
  check(sl_network_load(p.c_str(), &n));
  return Network(n);
}
Dataset load_data(const fs::path& p) {
  sl_dataset* d = nullptr;
  check(sl_dataset_load(p.c_str(), &d));
  return Dataset(d);
}
Params load_params(const fs::path& p) {
  sl_params* t = nullptr;
  check(sl_params_load(p.c_str(), &t));
  return Params(t);
}

double loss_of(const sl_network* n, const sl_dataset* d, const sl_params* t) {
  double v = 0.0;
  check(sl_loss(n, d, t, &v));
  return v;
}

void require_connect_widths(const sl_network* net, const sl_dataset* data) {
  int64_t n1 = sl_network_width(net, 1);
  int64_t N = sl_dataset_samples(data);
  if (sl_network_depth(net) < 2) reject("connect needs at least two layers");
  if (n1 < N + 1) {
    throw CliError{"precondition", "n_1 must be >= N+1 (n_1 = " +
                                       std::to_string(n1) + ", N = " +
                                       std::to_string(N) + ")"};
  }
}

// Connects a to b, verifies and writes path.json, report.json, trace.csv.
bool connect_and_report(const Config& c, const sl_network* net,
                        const sl_dataset* data, const sl_params* a,
                        const sl_params* b, double alpha, Summary& summary) {
  sl_connect_options copt = c.connect_options();
  sl_path* raw = nullptr;
  check(sl_connect(net, data, a, b, alpha, &copt, &raw));
  Path path(raw);
  sl_verify_options vopt = c.verify_options();
  sl_report* rraw = nullptr;
  check(sl_verify(net, data, path.get(), a, b, alpha, &vopt, &rraw));
  Report report(rraw);

  check(sl_path_save(path.get(), c.out_file("path.json").c_str()));
  char* json = nullptr;
  check(sl_report_to_json(report.get(), &json));
  write_file(c.out_file("report.json"), take(json));
  check(sl_path_write_trace(net, data, path.get(), c.samples,
                            c.out_file("trace.csv").c_str()));

  bool passed = sl_report_passed(report.get()) != 0;
  summary.num("alpha", alpha)
      .str("regime", sl_path_regime(path.get()))
      .integer("segments", static_cast<long long>(sl_path_segments(path.get())))
      .num("max_loss", sl_report_max_loss(report.get()))
      .flag("passed", passed);
  return passed;
}

int cmd_train(const Config& c) {
  c.validate_common();
  if (c.widths.size() < 3) reject("widths needs at least three entries");
  if (c.steps < 0) reject("steps must be >= 0");
  if (!(c.lr > 0)) reject("lr must be positive");
  ensure_out_dir(c);

  sl_network* nraw = nullptr;
  check(sl_network_create(c.widths.data(), c.widths.size(), c.slope,
                          c.loss.c_str(), &nraw));
  Network net(nraw);
  Dataset data;
  if (!c.data_file.empty()) {
    data = load_data(c.data_file);
  } else {
    if (c.data_n < 1) reject("data_n must be >= 1");
    if (c.data_n0 != 0 && c.data_n0 != c.widths.front()) {
      reject("data_n0 must equal widths[0]");
    }
    sl_dataset* d = nullptr;
    check(sl_dataset_generate(net.get(), c.data_n, c.data_seed.value_or(c.seed), &d));
    data.reset(d);
  }

  sl_train_options topt = sl_train_options_default();
  topt.steps = c.steps;
  topt.learning_rate = c.lr;
  Summary summary;
  double losses[2];
  const char* names[2] = {"theta_a.json", "theta_b.json"};
  uint64_t seeds[2] = {c.seed_a.value_or(c.seed + 1), c.seed_b.value_or(c.seed + 2)};
  for (int i = 0; i < 2; ++i) {
    sl_params* init = nullptr;
    check(sl_params_random(net.get(), seeds[i], &init));
    Params init_owner(init);
    sl_params* trained = nullptr;
    check(sl_train(net.get(), data.get(), init, &topt, &trained, &losses[i]));
    Params trained_owner(trained);
    check(sl_params_save(trained, c.out_file(names[i]).c_str()));
  }
  check(sl_network_save(net.get(), c.out_file("network.json").c_str()));
  check(sl_dataset_save(data.get(), c.out_file("data.json").c_str()));

  std::optional<double> alpha = c.explicit_alpha();
  summary.num("loss_a", losses[0])
      .num("loss_b", losses[1])
      .num("alpha", alpha.value_or(std::max(losses[0], losses[1])))
      .integer("steps", c.steps)
      .num("learning_rate", c.lr)
      .integer("seed_a", static_cast<long long>(seeds[0]))
      .integer("seed_b", static_cast<long long>(seeds[1]));
  write_file(c.out_file("train.json"), summary.render() + "\n");
  std::printf("%s\n", summary.render().c_str());
  return 0;
}

struct Endpoints {
  Network net;
  Dataset data;
  Params a;
  Params b;
};

Endpoints load_endpoints(const Config& c, const std::string& network,
                         const std::string& data, const std::string& a,
                         const std::string& b) {
  auto pick = [&](const std::string& given, const char* name) {
    return given.empty() ? c.out_file(name) : fs::path(given);
  };
  Endpoints e;
  e.net = load_network(pick(network, "network.json"));
  e.data = load_data(pick(data, "data.json"));
  e.a = load_params(pick(a, "theta_a.json"));
  e.b = load_params(pick(b, "theta_b.json"));
  return e;
}

double resolve_alpha(const Config& c, const Endpoints& e) {
  double la = loss_of(e.net.get(), e.data.get(), e.a.get());
  double lb = loss_of(e.net.get(), e.data.get(), e.b.get());
  std::optional<double> alpha = c.explicit_alpha();
  if (!alpha) return std::max(la, lb);
  if (*alpha < std::max(la, lb)) {
    throw CliError{"precondition", "alpha " + fmt(*alpha) +
                                       " is below an endpoint loss (" +
                                       fmt(std::max(la, lb)) + ")"};
  }
  return *alpha;
}

int cmd_connect(const Config& c, const Endpoints& e) {
  c.validate_common();
  require_connect_widths(e.net.get(), e.data.get());
  double alpha = resolve_alpha(c, e);
  ensure_out_dir(c);
  Summary summary;
  bool passed = connect_and_report(c, e.net.get(), e.data.get(), e.a.get(),
                                   e.b.get(), alpha, summary);
  write_file(c.out_file("connect.json"), summary.render() + "\n");
  std::printf("%s\n", summary.render().c_str());
  return passed ? 0 : kExitFail;
}

int cmd_verify(const Config& c, const Endpoints& e, const std::string& path_file) {
  c.validate_common();
  double alpha = resolve_alpha(c, e);
  ensure_out_dir(c);
  sl_path* raw = nullptr;
  check(sl_path_load(
      (path_file.empty() ? c.out_file("path.json") : fs::path(path_file)).c_str(),
      &raw));
  Path path(raw);
  sl_verify_options vopt = c.verify_options();
  sl_report* rraw = nullptr;
  check(sl_verify(e.net.get(), e.data.get(), path.get(), e.a.get(), e.b.get(),
                  alpha, &vopt, &rraw));
  Report report(rraw);
  char* json = nullptr;
  check(sl_report_to_json(report.get(), &json));
  std::string text = take(json);
  write_file(c.out_file("report.json"), text);
  std::printf("%s", text.c_str());
  return sl_report_passed(report.get()) ? 0 : kExitFail;
}

Certificate certify(const Config& c) {
  c.validate_common();
  int64_t n0 = c.data_n0 == 0 ? 1 : c.data_n0;
  if (!c.widths.empty()) {
    if (c.widths.size() != 3) reject("certify needs widths (n_0, N, N)");
    if (c.widths[1] != c.data_n) {
      reject("n_1 must equal N for certify (n_1 = " + std::to_string(c.widths[1]) +
             ", N = " + std::to_string(c.data_n) + ")");
    }
    if (c.widths[2] != c.data_n) reject("certify needs n_2 = N");
    n0 = c.widths[0];
  }
  if (c.loss != "square") reject("certify uses the square loss");
  sl_certify_options o = sl_certify_options_default();
  o.samples = c.data_n;
  o.input_dim = n0;
  o.seed = c.seed;
  o.slope = c.slope;
  o.max_seed_retries = c.max_seed_retries;
  o.barrier_samples = c.barrier_samples;
  sl_certificate* raw = nullptr;
  check(sl_certify(&o, &raw));
  return Certificate(raw);
}

int cmd_certify(const Config& c) {
  Certificate cert = certify(c);
  ensure_out_dir(c);
  char* json = nullptr;
  check(sl_certificate_to_json(cert.get(), &json));
  std::string text = take(json);
  write_file(c.out_file("certificate.json"), text);

  sl_network* n = nullptr;
  sl_dataset* d = nullptr;
  sl_params* t = nullptr;
  sl_params* tp = nullptr;
  check(sl_certificate_instance(cert.get(), &n, &d, &t, &tp));
  Network net(n);
  Dataset data(d);
  Params theta(t), theta_prime(tp);
  check(sl_network_save(n, c.out_file("network.json").c_str()));
  check(sl_dataset_save(d, c.out_file("data.json").c_str()));
  check(sl_params_save(t, c.out_file("theta_a.json").c_str()));
  check(sl_params_save(tp, c.out_file("theta_b.json").c_str()));
  std::printf("%s", text.c_str());
  return sl_certificate_valid(cert.get()) ? 0 : kExitFail;
}

int cmd_contrast(const Config& c) {
  Config width_n = c;
  width_n.widths.clear();
  Certificate cert = certify(width_n);
  sl_network* n = nullptr;
  sl_dataset* d = nullptr;
  sl_params* t = nullptr;
  sl_params* tp = nullptr;
  check(sl_certificate_instance(cert.get(), &n, &d, &t, &tp));
  Network net(n);
  Dataset data(d);
  Params theta(t), theta_prime(tp);

  sl_network* pn = nullptr;
  sl_params* pa = nullptr;
  check(sl_params_pad(n, t, c.seed, &pn, &pa));
  Network padded_net(pn);
  Params padded_a(pa);
  sl_params* pb = nullptr;
  check(sl_params_pad_like(tp, pa, &pb));
  Params padded_b(pb);

  ensure_out_dir(c);
  std::optional<double> explicit_alpha = c.explicit_alpha();
  double alpha = explicit_alpha.value_or(1e-10);
  Summary wide;
  bool passed = connect_and_report(c, pn, d, pa, pb, alpha, wide);
  check(sl_network_save(pn, c.out_file("network.json").c_str()));
  check(sl_dataset_save(d, c.out_file("data.json").c_str()));
  check(sl_params_save(pa, c.out_file("theta_a.json").c_str()));
  check(sl_params_save(pb, c.out_file("theta_b.json").c_str()));

  Summary narrow;
  narrow.integer("hidden_width", sl_network_width(n, 1))
      .flag("certificate_valid", sl_certificate_valid(cert.get()) != 0)
      .num("straight_barrier", sl_certificate_straight_barrier(cert.get()))
      .num("barrier", sl_certificate_barrier(cert.get()))
      .integer("seed", static_cast<long long>(sl_certificate_seed(cert.get())));
  wide.integer("hidden_width", sl_network_width(pn, 1));
  Summary top;
  top.add("width_n", narrow.render(2)).add("width_n_plus_1", wide.render(2));
  std::string text = top.render() + "\n";
  write_file(c.out_file("contrast.json"), text);
  std::printf("%s", text.c_str());
  return sl_certificate_valid(cert.get()) && passed ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sublevel-set path construction and disconnection certificates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value configuration file");

  Config c;
  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--samples", c.samples, "Samples per path segment");
  app.add_option("--alpha", c.alpha, "Sublevel bound, or 'max' for the larger endpoint loss");
  app.add_option("--widths", c.widths, "Layer widths n_0 ... n_L")->delimiter(',');
  app.add_option("--slope", c.slope, "Leaky ReLU negative slope");
  app.add_option("--loss", c.loss, "square or cross_entropy")
      ->check(CLI::IsMember({"square", "cross_entropy"}));
  app.add_option("--data_n", c.data_n, "Number of samples N");
  app.add_option("--data_n0", c.data_n0, "Input dimension n_0");
  app.add_option("--data_seed", c.data_seed, "Seed for generated data");
  app.add_option("--data_file", c.data_file, "Dataset JSON instead of generated data");
  app.add_option("--steps", c.steps, "Gradient descent steps");
  app.add_option("--lr", c.lr, "Learning rate");
  app.add_option("--seed_a", c.seed_a, "Initialization seed of the first endpoint");
  app.add_option("--seed_b", c.seed_b, "Initialization seed of the second endpoint");
  app.add_option("--inv_tol", c.inv_tol, "Output drift tolerance");
  app.add_option("--verify_tol", c.verify_tol, "Slack above alpha");
  app.add_option("--rank_tol_rel", c.rank_tol_rel, "Relative singular value cutoff");
  app.add_option("--feas_tol", c.feas_tol, "Span feasibility tolerance");
  app.add_option("--max_retries", c.max_retries, "Redraws during rank restoration");
  app.add_option("--max_seed_retries", c.max_seed_retries, "Seeds tried by certify");
  app.add_option("--barrier_samples", c.barrier_samples, "Samples per barrier piece");

  std::string network, data, theta_a, theta_b, path;
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--network", network, "Network JSON (default OUT/network.json)");
    sub->add_option("--data", data, "Dataset JSON (default OUT/data.json)");
    sub->add_option("--theta-a", theta_a, "First endpoint (default OUT/theta_a.json)");
    sub->add_option("--theta-b", theta_b, "Second endpoint (default OUT/theta_b.json)");
  };
  CLI::App* train = app.add_subcommand("train", "Train two endpoints by gradient descent");
  CLI::App* connect = app.add_subcommand("connect", "Build and verify a path between two endpoints");
  add_inputs(connect);
  CLI::App* verify = app.add_subcommand("verify", "Re-verify a saved path");
  add_inputs(verify);
  verify->add_option("--path", path, "Path JSON (default OUT/path.json)");
  CLI::App* certify_cmd = app.add_subcommand("certify", "Certify a disconnected pair of global minima");
  CLI::App* contrast = app.add_subcommand("contrast", "Certify at width N, then connect at width N+1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(c);
    if (connect->parsed()) {
      return cmd_connect(c, load_endpoints(c, network, data, theta_a, theta_b));
    }
    if (verify->parsed()) {
      return cmd_verify(c, load_endpoints(c, network, data, theta_a, theta_b), path);
    }
    if (certify_cmd->parsed()) return cmd_certify(c);
    if (contrast->parsed()) return cmd_contrast(c);
  } catch (const CliError& e) {
    std::fprintf(stderr, "{\"error\": %s, \"message\": %s}\n", quote(e.code).c_str(),
                 quote(e.message).c_str());
    return kExitError;
  }
  return kExitError;
}
