#include "bnnmi/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bnnmi/errors.hpp"
#include "bnnmi/random.hpp"
#include "bnnmi/specfun.hpp"

namespace bnnmi {

DirichletParams::DirichletParams(std::vector<double> alpha)
    : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) {
    throw DomainError("DirichletParams: need at least two classes");
  }
  for (const double a : alpha_) {
    if (!std::isfinite(a) || a < 0.0) {
      std::ostringstream msg;
      msg << "DirichletParams: concentration must be finite and >= 0, got " << a;
      throw DomainError(msg.str());
    }
    total_ += a;
  }
  if (!(total_ > 0.0)) {
    throw DomainError("DirichletParams: at least one concentration must be > 0");
  }
}

bool DirichletParams::strictly_positive() const {
  return std::all_of(alpha_.begin(), alpha_.end(),
                     [](double a) { return a > 0.0; });
}

void validate_simplex_row(std::span<const double> p, double tolerance) {
  double sum = 0.0;
  for (const double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "probability entries must be finite and >= 0, got " << v;
      throw DomainError(msg.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "probability row sums to " << sum << ", not 1";
    throw DomainError(msg.str());
  }
}

SimplexPoint::SimplexPoint(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw DomainError("SimplexPoint: empty vector");
  validate_simplex_row(p_, kSumTolerance);
}

SampleBatch::SampleBatch(std::size_t classes, std::vector<double> values)
    : classes_(classes), values_(std::move(values)) {
  if (classes_ == 0 || values_.empty() || values_.size() % classes_ != 0) {
    throw DomainError("SampleBatch: need M >= 1 rows of C >= 1 entries");
  }
  rows_ = values_.size() / classes_;
  for (std::size_t m = 0; m < rows_; ++m) {
    validate_simplex_row(row(m), SimplexPoint::kSumTolerance);
  }
}

SampleBatch::SampleBatch(std::span<const SimplexPoint> points) {
  if (points.empty()) throw DomainError("SampleBatch: need M >= 1 rows");
  classes_ = points.front().classes();
  rows_ = points.size();
  values_.reserve(rows_ * classes_);
  for (const auto& point : points) {
    if (point.classes() != classes_) {
      throw DomainError("SampleBatch: rows must share the class count");
    }
    values_.insert(values_.end(), point.p().begin(), point.p().end());
  }
}

namespace dirichlet {

namespace {

void require_strictly_positive(const DirichletParams& params, const char* op) {
  if (!params.strictly_positive()) {
    throw DomainError(std::string(op) +
                      ": requires strictly positive concentrations");
  }
}

}  // namespace

double log_density(const DirichletParams& params, std::span<const double> p) {
  require_strictly_positive(params, "log_density");
  if (p.size() != params.classes()) {
    throw DomainError("log_density: dimension mismatch");
  }
  double acc = -specfun::log_beta_multivariate(params.alpha());
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] > 0.0)) throw DomainError("log_density: point must be interior");
    acc += (params[k] - 1.0) * std::log(p[k]);
  }
  return acc;
}

double differential_entropy(const DirichletParams& params) {
  require_strictly_positive(params, "differential_entropy");
  const double total = params.total();
  const auto classes = static_cast<double>(params.classes());
  double acc = specfun::log_beta_multivariate(params.alpha()) +
               (total - classes) * specfun::digamma(total);
  for (const double a : params.alpha()) acc -= (a - 1.0) * specfun::digamma(a);
  return acc;
}

SimplexPoint mean(const DirichletParams& params) {
  std::vector<double> m(params.alpha().begin(), params.alpha().end());
  for (double& v : m) v /= params.total();
  return SimplexPoint(std::move(m));
}

double cross_moment(const DirichletParams& params, std::size_t i, std::size_t j) {
  require_strictly_positive(params, "cross_moment");
  if (i >= params.classes() || j >= params.classes()) {
    throw IndexError("cross_moment: class index out of range");
  }
  const double total = params.total();
  const double weight = params[i] / total;
  const double lead = i == j ? specfun::digamma(params[i] + 1.0)
                             : specfun::digamma(params[j]);
  return weight * (lead - specfun::digamma(total + 1.0));
}

SampleBatch sample(const DirichletParams& params, std::size_t count,
                   std::uint64_t seed) {
  if (count == 0) throw DomainError("sample: count must be >= 1");
  const std::size_t classes = params.classes();
  Rng rng(seed);
  std::vector<double> values(count * classes, 0.0);
  std::vector<double> log_g(classes);
  for (std::size_t m = 0; m < count; ++m) {
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < classes; ++k) {
      if (params[k] > 0.0) {
        log_g[k] = rng.log_gamma_variate(params[k]);
        max_log = std::max(max_log, log_g[k]);
      }
    }
    double* out = values.data() + m * classes;
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      if (params[k] > 0.0) {
        out[k] = std::exp(log_g[k] - max_log);
        sum += out[k];
      }
    }
    for (std::size_t k = 0; k < classes; ++k) out[k] /= sum;
  }
  return SampleBatch(classes, std::move(values));
}

}  // namespace dirichlet
}  // namespace bnnmi
