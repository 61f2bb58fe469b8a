#include "rnav/rnav.h"

#include <cstring>
#include <string>

#include "rnav/expr.hpp"
#include "rnav/scenario.hpp"

struct rnav_metric {
  rnav::RandersMetric metric;
};

struct rnav_expr {
  rnav::Expr expr;
};

namespace {

thread_local std::string g_error;
thread_local int g_column = 0;

rnav_status status_of(rnav::ErrorKind k) {
  switch (k) {
    case rnav::ErrorKind::kInvalidArgument: return RNAV_E_INVALID_ARGUMENT;
    case rnav::ErrorKind::kDomain: return RNAV_E_DOMAIN;
    case rnav::ErrorKind::kParse: return RNAV_E_PARSE;
    case rnav::ErrorKind::kConfig: return RNAV_E_CONFIG;
    case rnav::ErrorKind::kHypothesis: return RNAV_E_HYPOTHESIS;
    case rnav::ErrorKind::kVerification: return RNAV_E_VERIFICATION;
    case rnav::ErrorKind::kNumerical: return RNAV_E_NUMERICAL;
    case rnav::ErrorKind::kIo: return RNAV_E_IO;
  }
  return RNAV_E_INTERNAL;
}

template <class Body>
rnav_status guard(Body&& body) {
  g_error.clear();
  g_column = 0;
  try {
    body();
    return RNAV_OK;
  } catch (const rnav::ParseError& e) {
    g_error = e.what();
    g_column = e.column();
    return RNAV_E_PARSE;
  } catch (const rnav::Error& e) {
    g_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_error = e.what();
    return RNAV_E_INTERNAL;
  } catch (...) {
    g_error = "unknown exception";
    return RNAV_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw rnav::InvalidArgument(std::string(what) + " is NULL");
}

rnav::Vec<double> vec(const double* p, int n) {
  need(p, "vector argument");
  rnav::Vec<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = p[i];
  return v;
}

void put(const rnav::Vec<double>& v, double* out) {
  need(out, "output");
  for (int i = 0; i < v.size(); ++i) out[i] = v[i];
}

rnav::LineSink sink_of(rnav_line_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& s) { fn(s.c_str(), user); };
}

}  // namespace

extern "C" {

const char* rnav_version(void) { return "1.0.0"; }
const char* rnav_last_error(void) { return g_error.c_str(); }
int rnav_last_error_column(void) { return g_column; }

void rnav_run_options_init(rnav_run_options* opt) {
  if (!opt) return;
  std::memset(opt, 0, sizeof *opt);
}

rnav_status rnav_run_scenario(const char* path, const rnav_run_options* opt, rnav_line_fn sink, void* user,
                              int* exit_code) {
  return guard([&] {
    need(path, "path");
    need(exit_code, "exit_code");
    rnav::RunOptions ro;
    if (opt) {
      if (opt->has_seed) ro.seed = opt->seed;
      if (opt->levels > 0) ro.levels = opt->levels;
      if (opt->samples > 0) ro.samples = opt->samples;
      if (opt->tol_abs > 0) ro.tol_abs = opt->tol_abs;
      if (opt->tol_rel > 0) ro.tol_rel = opt->tol_rel;
      if (opt->csv_dir) ro.csv_dir = opt->csv_dir;
    }
    *exit_code = rnav::run_scenario_file(path, ro, sink_of(sink, user));
  });
}

rnav_status rnav_selftest(uint64_t seed, double tol_override, rnav_line_fn sink, void* user, int* exit_code) {
  return guard([&] {
    need(exit_code, "exit_code");
    rnav::SelftestOptions so;
    so.seed = seed;
    if (tol_override > 0) so.tol = tol_override;
    *exit_code = rnav::selftest(so, sink_of(sink, user));
  });
}

rnav_status rnav_expr_parse(const char* text, rnav_expr** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = nullptr;
    *out = new rnav_expr{rnav::Expr::parse(text)};
  });
}

void rnav_expr_free(rnav_expr* e) { delete e; }

int rnav_expr_arity(const rnav_expr* e) { return e ? e->expr.arity() : -1; }

rnav_status rnav_expr_print(const rnav_expr* e, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(e, "expression");
    const std::string s = e->expr.print();
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
      if (n < s.size()) throw rnav::InvalidArgument("buffer too small for the printed expression");
    }
  });
}

rnav_status rnav_expr_eval(const rnav_expr* e, const double* x, int n, double* out) {
  return guard([&] {
    need(e, "expression");
    need(out, "out");
    if (n < 0 || n > rnav::kMaxDim) throw rnav::InvalidArgument("coordinate count out of range");
    *out = e->expr.eval(vec(x, n));
  });
}

rnav_status rnav_metric_create(int dim, double curvature, rnav_wind_kind kind, double k0, const double* q_upper,
                               size_t q_count, const double* e, rnav_metric** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    const rnav::SpaceForm space(dim, curvature);
    const int qn = kind == RNAV_WIND_SPHERE_ROTATION ? dim + 1 : dim;
    std::vector<double> upper;
    if (q_upper) upper.assign(q_upper, q_upper + q_count);
    const rnav::Mat<double> q = rnav::antisymmetric_from_upper(qn, upper);
    const rnav::Vec<double> ev = e ? vec(e, dim) : rnav::Vec<double>(dim);
    auto wind = [&]() {
      switch (kind) {
        case RNAV_WIND_ZERO: return rnav::VectorFieldSpec::zero(dim);
        case RNAV_WIND_CONSTANT: return rnav::VectorFieldSpec::constant(ev);
        case RNAV_WIND_AFFINE: return rnav::VectorFieldSpec::affine(dim, k0, q, ev);
        case RNAV_WIND_PROJECTIVE: return rnav::VectorFieldSpec::projective(dim, curvature, q, ev);
        case RNAV_WIND_SPHERE_ROTATION: return rnav::VectorFieldSpec::sphere_rotation(dim, curvature, q);
      }
      throw rnav::InvalidArgument("unknown wind kind");
    };
    const rnav::VectorFieldSpec w = wind();
    *out = new rnav_metric{rnav::RandersMetric(rnav::NavigationSpec(space, w))};
  });
}

void rnav_metric_free(rnav_metric* m) { delete m; }

int rnav_metric_dim(const rnav_metric* m) { return m ? m->metric.dim() : -1; }

rnav_status rnav_metric_F(const rnav_metric* m, const double* x, const double* y, double* out) {
  return guard([&] {
    need(m, "metric");
    need(out, "out");
    const int n = m->metric.dim();
    *out = m->metric.F(vec(x, n), vec(y, n));
  });
}

rnav_status rnav_metric_fundamental_tensor(const rnav_metric* m, const double* x, const double* y,
                                           double* out_row_major) {
  return guard([&] {
    need(m, "metric");
    need(out_row_major, "out");
    const int n = m->metric.dim();
    const rnav::Mat<double> g = m->metric.fundamental_tensor(vec(x, n), vec(y, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out_row_major[i * n + j] = g(i, j);
  });
}

rnav_status rnav_metric_inverse_legendre(const rnav_metric* m, const double* x, const double* xi, double* out) {
  return guard([&] {
    need(m, "metric");
    const int n = m->metric.dim();
    put(m->metric.inverse_legendre(vec(x, n), vec(xi, n)), out);
  });
}

rnav_status rnav_metric_spray(const rnav_metric* m, const double* x, const double* y, double* out) {
  return guard([&] {
    need(m, "metric");
    const int n = m->metric.dim();
    put(m->metric.spray(vec(x, n), vec(y, n)), out);
  });
}

rnav_status rnav_metric_s_curvature(const rnav_metric* m, const double* x, const double* y, double* out) {
  return guard([&] {
    need(m, "metric");
    need(out, "out");
    const int n = m->metric.dim();
    *out = m->metric.s_curvature(vec(x, n), vec(y, n));
  });
}

rnav_status rnav_metric_flag_curvature(const rnav_metric* m, const double* x, const double* y, const double* v,
                                       double* out) {
  return guard([&] {
    need(m, "metric");
    need(out, "out");
    const int n = m->metric.dim();
    *out = m->metric.flag_curvature(vec(x, n), vec(y, n), vec(v, n));
  });
}

rnav_status rnav_metric_gradient(const rnav_metric* m, const rnav_expr* f, const double* x, double* out) {
  return guard([&] {
    need(m, "metric");
    need(f, "expression");
    const int n = m->metric.dim();
    put(m->metric.gradient(f->expr.to_field(n), vec(x, n)), out);
  });
}

rnav_status rnav_metric_laplacian(const rnav_metric* m, const rnav_expr* f, const double* x, double* out) {
  return guard([&] {
    need(m, "metric");
    need(f, "expression");
    need(out, "out");
    const int n = m->metric.dim();
    *out = m->metric.laplacian(f->expr.to_field(n), vec(x, n));
  });
}

}  // extern "C"
