#include "anderson/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace anderson {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

PotentialSpec::PotentialSpec(PotentialFamily f, double a, double b, double eps)
    : family_(f), a_(a), b_(b), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("potential scale eps must be > 0");
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("potential parameters must be finite");
  if (f == PotentialFamily::uniform && !(a < b))
    throw std::invalid_argument("uniform potential requires lo < hi");
  if (f == PotentialFamily::gaussian && !(b > 0.0))
    throw std::invalid_argument("gaussian potential requires std > 0");
}

PotentialSpec PotentialSpec::uniform(double lo, double hi, double eps) {
  return PotentialSpec(PotentialFamily::uniform, lo, hi, eps);
}

PotentialSpec PotentialSpec::gaussian(double mean, double std, double eps) {
  return PotentialSpec(PotentialFamily::gaussian, mean, std, eps);
}

PotentialSpec PotentialSpec::from_name(std::string_view family, double a, double b, double eps) {
  if (family == "uniform") return uniform(a, b, eps);
  if (family == "gaussian" || family == "normal") return gaussian(a, b, eps);
  if (family == "bernoulli" || family == "binary" || family == "discrete")
    throw std::invalid_argument("potential family '" + std::string(family) +
                                "' rejected: the potential law must be absolutely continuous "
                                "with respect to Lebesgue measure (no atoms)");
  throw std::invalid_argument("unknown potential family '" + std::string(family) + "'");
}

PotentialSpec PotentialSpec::scaled(double factor) const {
  return PotentialSpec(family_, a_, b_, eps_ * factor);
}

double PotentialSpec::mean() const noexcept {
  return family_ == PotentialFamily::uniform ? eps_ * 0.5 * (a_ + b_) : eps_ * a_;
}

double PotentialSpec::variance() const noexcept {
  if (family_ == PotentialFamily::uniform) return eps_ * eps_ * (b_ - a_) * (b_ - a_) / 12.0;
  return eps_ * eps_ * b_ * b_;
}

std::pair<double, double> PotentialSpec::effective_support() const noexcept {
  if (family_ == PotentialFamily::uniform) return {eps_ * a_, eps_ * b_};
  return {eps_ * (a_ - 8.0 * b_), eps_ * (a_ + 8.0 * b_)};
}

double PotentialSpec::draw(Rng& rng) const {
  if (family_ == PotentialFamily::uniform) {
    std::uniform_real_distribution<double> u(a_, b_);
    return eps_ * u(rng);
  }
  std::normal_distribution<double> g(a_, b_);
  return eps_ * g(rng);
}

std::vector<std::pair<double, double>> PotentialSpec::quadrature(int points) const {
  std::vector<std::pair<double, double>> out;
  if (family_ == PotentialFamily::uniform) {
    if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
    out.reserve(static_cast<std::size_t>(points));
    const double w = 1.0 / points;
    for (int i = 0; i < points; ++i) out.emplace_back(eps_ * (a_ + (b_ - a_) * (i + 0.5) * w), w);
    return out;
  }
  if (points != 64) throw std::invalid_argument("gaussian quadrature is fixed at 64 points");
  using rule = boost::math::quadrature::gauss<double, 64>;
  const auto& x = rule::abscissa();
  const auto& wt = rule::weights();
  const double half = 8.0 * b_;
  double total = 0.0;
  auto push = [&](double t, double w) {
    const double z = half * t / b_;
    const double weight = w * std::exp(-0.5 * z * z);
    out.emplace_back(eps_ * (a_ + half * t), weight);
    total += weight;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    push(x[i], wt[i]);
    push(-x[i], wt[i]);
  }
  for (auto& p : out) p.second /= total;
  std::sort(out.begin(), out.end());
  return out;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (family_ == PotentialFamily::uniform ? "uniform(" : "gaussian(") << a_ << ',' << b_ << ")*" << eps_;
  return os.str();
}

double Disorder::min() const {
  if (values.empty()) throw std::logic_error("empty disorder");
  return *std::min_element(values.begin(), values.end());
}

double Disorder::max() const {
  if (values.empty()) throw std::logic_error("empty disorder");
  return *std::max_element(values.begin(), values.end());
}

Disorder sample_disorder(const PotentialSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("disorder length must be >= 1");
  Disorder d{std::vector<double>(n), seed, spec};
  Rng rng(seed);
  for (auto& v : d.values) v = spec.draw(rng);
  return d;
}

Disorder make_disorder(std::vector<double> values, PotentialSpec spec) {
  if (values.empty()) throw std::invalid_argument("disorder length must be >= 1");
  return Disorder{std::move(values), 0, spec};
}

}  // namespace anderson
