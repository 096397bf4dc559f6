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

#include "sublevel/sublevel.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "sublevel/certificate.hpp"
#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"
#include "sublevel/serialize.hpp"
#include "sublevel/training.hpp"
#include "sublevel/verify.hpp"

using namespace sublevel;

struct sl_network {
  NetworkSpec spec;
};
struct sl_dataset {
  DataSet data;
};
struct sl_params {
  Theta theta;
};
struct sl_path {
  ParamPath path;
  std::string regime;
};
struct sl_report {
  PathReport report;
};
struct sl_certificate {
  WidthNInstance instance;
  Theta theta_prime;
  DisconnectionCertificate cert;
  BarrierScan barrier;
  std::uint64_t requested_seed;
  int attempts;
};

namespace {

thread_local std::string g_last_error;

sl_status to_status(ErrorCode code) { return static_cast<sl_status>(code); }

template <typename Fn>
sl_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  }
  return SL_ERR_INTERNAL;
}

void check_out(const void* p) {
  require(p != nullptr, ErrorCode::kInvalidArgument, "null output pointer");
}

template <typename T>
const T& deref(const T* p, const char* what) {
  require(p != nullptr, ErrorCode::kInvalidArgument,
          std::string("null ") + what + " handle");
  return *p;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Matrix row_major(const double* p, int64_t rows, int64_t cols) {
  require(p != nullptr || rows * cols == 0, ErrorCode::kInvalidArgument,
          "null matrix data");
  require(rows >= 0 && cols >= 0, ErrorCode::kInvalidArgument,
          "negative matrix dimension");
  Matrix m(rows, cols);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) m(r, c) = p[r * cols + c];
  }
  return m;
}

Tolerances tolerances(const sl_connect_options& o) {
  Tolerances t;
  t.rank_tol_rel = o.rank_tol_rel;
  t.feas_tol = o.feas_tol;
  t.inv_tol = o.inv_tol;
  t.verify_tol = o.verify_tol;
  return t;
}

void check_positive(double v, const char* name) {
  require(v > 0.0, ErrorCode::kInvalidArgument, std::string(name) + " must be positive");
}

}  // namespace

extern "C" {

const char* sl_version(void) { return "0.1.0"; }

const char* sl_status_name(sl_status status) {
  if (status == SL_OK) return "ok";
  if (status < SL_ERR_INVALID_ARGUMENT || status > SL_ERR_INTERNAL) return "unknown";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* sl_last_error(void) { return g_last_error.c_str(); }

void sl_string_free(char* s) { std::free(s); }

// ---- networks

sl_status sl_network_create(const int64_t* widths, size_t n_widths,
                            double slope, const char* loss_name,
                            sl_network** out) {
  return guard([&] {
    check_out(out);
    require(widths != nullptr && n_widths >= 2, ErrorCode::kInvalidArgument,
            "need at least two widths");
    require(loss_name != nullptr, ErrorCode::kInvalidArgument, "null loss name");
    std::vector<Index> w(widths, widths + n_widths);
    *out = new sl_network{NetworkSpec(std::move(w), Activation::leaky_relu(slope),
                                      make_loss(std::string(loss_name)))};
  });
}

sl_status sl_network_load(const char* file, sl_network** out) {
  return guard([&] {
    check_out(out);
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    *out = new sl_network{spec_from_json(parse_json(read_text_file(file)))};
  });
}

sl_status sl_network_save(const sl_network* net, const char* file) {
  return guard([&] {
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    write_text_file(file, dump_json(spec_to_json(deref(net, "network").spec)));
  });
}

size_t sl_network_depth(const sl_network* net) {
  return net == nullptr ? 0 : net->spec.depth();
}

int64_t sl_network_width(const sl_network* net, size_t layer) {
  if (net == nullptr || layer > net->spec.depth()) return 0;
  return net->spec.width(layer);
}

void sl_network_free(sl_network* net) { delete net; }

// ---- data

sl_status sl_dataset_create(const double* x, int64_t rows, int64_t x_cols,
                            const double* y, int64_t y_cols, sl_dataset** out) {
  return guard([&] {
    check_out(out);
    *out = new sl_dataset{
        DataSet::create(row_major(x, rows, x_cols), row_major(y, rows, y_cols))};
  });
}

sl_status sl_dataset_generate(const sl_network* net, int64_t samples,
                              uint64_t seed, sl_dataset** out) {
  return guard([&] {
    check_out(out);
    require(samples >= 1, ErrorCode::kInvalidArgument, "need at least one sample");
    Rng rng(seed);
    *out = new sl_dataset{generate_dataset(deref(net, "network").spec, samples, rng)};
  });
}

sl_status sl_dataset_load(const char* file, sl_dataset** out) {
  return guard([&] {
    check_out(out);
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    *out = new sl_dataset{dataset_from_json(parse_json(read_text_file(file)))};
  });
}

sl_status sl_dataset_save(const sl_dataset* data, const char* file) {
  return guard([&] {
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    write_text_file(file, dump_json(dataset_to_json(deref(data, "dataset").data)));
  });
}

int64_t sl_dataset_samples(const sl_dataset* data) {
  return data == nullptr ? 0 : data->data.samples();
}

void sl_dataset_free(sl_dataset* data) { delete data; }

// ---- parameters

sl_status sl_params_random(const sl_network* net, uint64_t seed, sl_params** out) {
  return guard([&] {
    check_out(out);
    Rng rng(seed);
    *out = new sl_params{random_theta(deref(net, "network").spec, rng)};
  });
}

sl_status sl_params_load(const char* file, sl_params** out) {
  return guard([&] {
    check_out(out);
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    *out = new sl_params{theta_from_json(parse_json(read_text_file(file)))};
  });
}

sl_status sl_params_save(const sl_params* params, const char* file) {
  return guard([&] {
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    write_text_file(file, dump_json(theta_to_json(deref(params, "params").theta)));
  });
}

sl_status sl_params_to_json(const sl_params* params, char** out) {
  return guard([&] {
    check_out(out);
    *out = copy_string(dump_json(theta_to_json(deref(params, "params").theta)));
  });
}

sl_status sl_params_swap_neurons(const sl_params* params, int64_t j, int64_t k,
                                 sl_params** out) {
  return guard([&] {
    check_out(out);
    *out = new sl_params{permute_neurons(deref(params, "params").theta, j, k)};
  });
}

sl_status sl_params_pad(const sl_network* net, const sl_params* params,
                        uint64_t seed, sl_network** out_net, sl_params** out) {
  return guard([&] {
    check_out(out_net);
    check_out(out);
    Rng rng(seed);
    PaddedNetwork padded = pad_first_layer(deref(net, "network").spec,
                                           deref(params, "params").theta, rng);
    auto* n = new sl_network{padded.spec};
    *out = new sl_params{std::move(padded.theta)};
    *out_net = n;
  });
}

sl_status sl_params_pad_like(const sl_params* params, const sl_params* reference,
                             sl_params** out) {
  return guard([&] {
    check_out(out);
    *out = new sl_params{pad_like(deref(params, "params").theta,
                                  deref(reference, "reference").theta)};
  });
}

void sl_params_free(sl_params* params) { delete params; }

sl_status sl_loss(const sl_network* net, const sl_dataset* data,
                  const sl_params* params, double* out) {
  return guard([&] {
    check_out(out);
    const NetworkSpec& spec = deref(net, "network").spec;
    const Theta& theta = deref(params, "params").theta;
    validate_theta(spec, theta);
    *out = loss(spec, theta, deref(data, "dataset").data);
  });
}

sl_train_options sl_train_options_default(void) {
  TrainOptions d;
  return {d.steps, d.learning_rate};
}

sl_status sl_train(const sl_network* net, const sl_dataset* data,
                   const sl_params* init, const sl_train_options* options,
                   sl_params** out, double* final_loss) {
  return guard([&] {
    check_out(out);
    sl_train_options o = options ? *options : sl_train_options_default();
    require(o.steps >= 0, ErrorCode::kInvalidArgument, "steps must be >= 0");
    check_positive(o.learning_rate, "learning rate");
    TrainOptions topt;
    topt.steps = o.steps;
    topt.learning_rate = o.learning_rate;
    TrainResult r = train_gradient_descent(deref(net, "network").spec,
                                           deref(init, "params").theta,
                                           deref(data, "dataset").data, topt);
    if (final_loss != nullptr) *final_loss = r.final_loss;
    *out = new sl_params{std::move(r.theta)};
  });
}

// ---- paths

sl_connect_options sl_connect_options_default(void) {
  Tolerances t;
  ConnectOptions c;
  return {c.seed, c.max_retries, t.rank_tol_rel, t.feas_tol,
          t.inv_tol, t.verify_tol, c.subnet.verify_samples};
}

sl_status sl_connect(const sl_network* net, const sl_dataset* data,
                     const sl_params* a, const sl_params* b, double alpha,
                     const sl_connect_options* options, sl_path** out) {
  return guard([&] {
    check_out(out);
    sl_connect_options o = options ? *options : sl_connect_options_default();
    check_positive(o.rank_tol_rel, "rank_tol_rel");
    check_positive(o.feas_tol, "feas_tol");
    check_positive(o.inv_tol, "inv_tol");
    check_positive(o.verify_tol, "verify_tol");
    require(o.verify_samples >= 2, ErrorCode::kInvalidArgument,
            "verify_samples must be >= 2");
    ConnectOptions copt;
    copt.tol = tolerances(o);
    copt.seed = o.seed;
    copt.max_retries = o.max_retries;
    copt.subnet.tol = copt.tol;
    copt.subnet.verify_samples = o.verify_samples;
    ConnectResult r = connect_sublevel(deref(net, "network").spec,
                                       deref(data, "dataset").data,
                                       deref(a, "params").theta,
                                       deref(b, "params").theta, alpha, copt);
    *out = new sl_path{std::move(r.path), regime_name(r.regime)};
  });
}

size_t sl_path_segments(const sl_path* path) {
  return path == nullptr ? 0 : path->path.size();
}

const char* sl_path_regime(const sl_path* path) {
  return path == nullptr ? "" : path->regime.c_str();
}

sl_status sl_path_endpoint(const sl_path* path, int which_end, sl_params** out) {
  return guard([&] {
    check_out(out);
    const ParamPath& p = deref(path, "path").path;
    *out = new sl_params{which_end == 0 ? p.start() : p.end()};
  });
}

sl_status sl_path_save(const sl_path* path, const char* file) {
  return guard([&] {
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    write_text_file(file, dump_json(path_to_json(deref(path, "path").path)));
  });
}

sl_status sl_path_load(const char* file, sl_path** out) {
  return guard([&] {
    check_out(out);
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    *out = new sl_path{path_from_json(parse_json(read_text_file(file))), ""};
  });
}

sl_status sl_path_write_trace(const sl_network* net, const sl_dataset* data,
                              const sl_path* path, int samples, const char* file) {
  return guard([&] {
    require(file != nullptr, ErrorCode::kInvalidArgument, "null file name");
    require(samples >= 2, ErrorCode::kInvalidArgument, "need at least 2 samples");
    std::ofstream os(file, std::ios::binary);
    require(static_cast<bool>(os), ErrorCode::kIo,
            std::string("cannot write '") + file + "'");
    write_trace_csv(os, deref(net, "network").spec, deref(data, "dataset").data,
                    deref(path, "path").path, samples);
    require(static_cast<bool>(os), ErrorCode::kIo,
            std::string("write to '") + file + "' failed");
  });
}

void sl_path_free(sl_path* path) { delete path; }

sl_verify_options sl_verify_options_default(void) {
  VerifyOptions d;
  return {d.samples_per_segment, d.verify_tol, d.inv_tol, d.endpoint_tol};
}

sl_status sl_verify(const sl_network* net, const sl_dataset* data,
                    const sl_path* path, const sl_params* a, const sl_params* b,
                    double alpha, const sl_verify_options* options,
                    sl_report** out) {
  return guard([&] {
    check_out(out);
    sl_verify_options o = options ? *options : sl_verify_options_default();
    require(o.samples_per_segment >= 2, ErrorCode::kInvalidArgument,
            "samples_per_segment must be >= 2");
    check_positive(o.verify_tol, "verify_tol");
    check_positive(o.inv_tol, "inv_tol");
    check_positive(o.endpoint_tol, "endpoint_tol");
    VerifyOptions vopt{o.samples_per_segment, o.verify_tol, o.inv_tol, o.endpoint_tol};
    const NetworkSpec& spec = deref(net, "network").spec;
    const DataSet& d = deref(data, "dataset").data;
    const ParamPath& p = deref(path, "path").path;
    const Theta& ta = a ? a->theta : p.start();
    const Theta& tb = b ? b->theta : p.end();
    *out = new sl_report{verify_path(spec, d, p, ta, tb, alpha, vopt)};
  });
}

int sl_report_passed(const sl_report* report) {
  return report != nullptr && report->report.passed ? 1 : 0;
}

double sl_report_max_loss(const sl_report* report) {
  return report == nullptr ? 0.0 : report->report.max_loss;
}

sl_status sl_report_to_json(const sl_report* report, char** out) {
  return guard([&] {
    check_out(out);
    *out = copy_string(dump_json(report_to_json(deref(report, "report").report)));
  });
}

void sl_report_free(sl_report* report) { delete report; }

// ---- certificates

sl_certify_options sl_certify_options_default(void) {
  return {4, 1, 0, 0.5, 10, 400};
}

sl_status sl_certify(const sl_certify_options* options, sl_certificate** out) {
  return guard([&] {
    check_out(out);
    sl_certify_options o = options ? *options : sl_certify_options_default();
    require(o.samples >= 2, ErrorCode::kInvalidArgument, "certify needs N >= 2");
    require(o.input_dim >= 1, ErrorCode::kInvalidArgument, "certify needs n_0 >= 1");
    require(o.max_seed_retries >= 1, ErrorCode::kInvalidArgument,
            "max_seed_retries must be >= 1");
    require(o.barrier_samples >= 2, ErrorCode::kInvalidArgument,
            "barrier_samples must be >= 2");
    IndexList all(static_cast<std::size_t>(o.samples));
    for (Index i = 0; i < o.samples; ++i) all[static_cast<std::size_t>(i)] = i;
    std::string last = "no attempt made";
    for (int attempt = 0; attempt < o.max_seed_retries; ++attempt) {
      std::uint64_t seed = o.seed + static_cast<std::uint64_t>(attempt);
      std::optional<WidthNInstance> inst;
      try {
        inst = build_width_n_instance(o.samples, o.input_dim, seed, o.slope);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRankNotRestored) throw;
        last = e.what();
        continue;
      }
      Theta swapped = permute_neurons(inst->theta, 0, 1);
      DisconnectionCertificate cert =
          certify_disconnection(inst->spec, inst->data, inst->theta, swapped, all);
      if (!cert.valid()) {
        last = cert.failure_reason();
        continue;
      }
      BarrierScan scan = barrier_scan(inst->spec, inst->data, inst->theta,
                                      swapped, o.barrier_samples);
      *out = new sl_certificate{std::move(*inst), std::move(swapped), cert, scan,
                                o.seed, attempt + 1};
      return;
    }
    fail(ErrorCode::kDegenerateDeterminant,
         "no valid certificate after " + std::to_string(o.max_seed_retries) +
             " seeds; last failure: " + last);
  });
}

int sl_certificate_valid(const sl_certificate* cert) {
  return cert != nullptr && cert->cert.valid() ? 1 : 0;
}

double sl_certificate_barrier(const sl_certificate* cert) {
  return cert == nullptr ? 0.0 : cert->barrier.barrier;
}

double sl_certificate_straight_barrier(const sl_certificate* cert) {
  return cert == nullptr ? 0.0 : cert->barrier.straight;
}

uint64_t sl_certificate_seed(const sl_certificate* cert) {
  return cert == nullptr ? 0 : cert->instance.seed;
}

sl_status sl_certificate_instance(const sl_certificate* cert, sl_network** net,
                                  sl_dataset** data, sl_params** theta,
                                  sl_params** theta_prime) {
  return guard([&] {
    const sl_certificate& c = deref(cert, "certificate");
    if (net) *net = new sl_network{c.instance.spec};
    if (data) *data = new sl_dataset{c.instance.data};
    if (theta) *theta = new sl_params{c.instance.theta};
    if (theta_prime) *theta_prime = new sl_params{c.theta_prime};
  });
}

sl_status sl_certificate_to_json(const sl_certificate* cert, char** out) {
  return guard([&] {
    check_out(out);
    const sl_certificate& c = deref(cert, "certificate");
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(
                      instance_hash(c.instance.data, c.instance.theta)));
    Json j = {{"requested_seed", c.requested_seed},
              {"attempts", c.attempts},
              {"instance",
               {{"seed", c.instance.seed},
                {"N", static_cast<long long>(c.instance.data.samples())},
                {"n0", static_cast<long long>(c.instance.spec.input_dim())},
                {"network", spec_to_json(c.instance.spec)},
                {"hash", hash},
                {"swapped_neurons", {0, 1}}}},
              {"certificate", certificate_to_json(c.cert)},
              {"barrier", barrier_to_json(c.barrier)}};
    *out = copy_string(dump_json(j));
  });
}

void sl_certificate_free(sl_certificate* cert) { delete cert; }

}  // extern "C"
