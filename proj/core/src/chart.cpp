#include "dwgeom/chart.hpp"

#include <set>

namespace dwgeom {

namespace {

std::vector<std::string> default_names(int n, int N) {
  std::vector<std::string> names;
  names.reserve((N + 1) * (n + 1));
  for (int mu = 1; mu <= n; ++mu) names.push_back("x" + std::to_string(mu));
  for (int i = 1; i <= N; ++i) names.push_back("q" + std::to_string(i));
  for (int mu = 1; mu <= n; ++mu)
    for (int i = 1; i <= N; ++i)
      names.push_back("p" + std::to_string(mu) + "_" + std::to_string(i));
  names.push_back("p");
  return names;
}

}  // namespace

ChartSpec::ChartSpec(int n, int N) : n_(n), N_(N), names_(default_names(n, N)) {
  validate();
}

ChartSpec::ChartSpec(int n, int N, std::vector<std::string> names)
    : n_(n), N_(N), names_(std::move(names)) {
  validate();
}

void ChartSpec::validate() const {
  if (n_ < 1 || N_ < 1) throw chart_error("chart requires n >= 1 and N >= 1");
  if (dim() > 64) throw chart_error("chart dimension exceeds 64");
  if (static_cast<int>(names_.size()) != dim())
    throw chart_error("chart needs exactly (N+1)(n+1) coordinate labels");
  std::set<std::string> uniq(names_.begin(), names_.end());
  if (static_cast<int>(uniq.size()) != dim())
    throw chart_error("coordinate labels must be unique");
}

void ChartPoint::check_shape(const ChartSpec& spec) const {
  if (static_cast<int>(x.size()) != spec.n() || static_cast<int>(q.size()) != spec.N() ||
      static_cast<int>(pmom.size()) != spec.n() * spec.N())
    throw chart_error("chart point shape does not match chart");
}

std::vector<double> ChartPoint::to_flat(const ChartSpec& spec) const {
  check_shape(spec);
  std::vector<double> flat;
  flat.reserve(spec.dim());
  flat.insert(flat.end(), x.begin(), x.end());
  flat.insert(flat.end(), q.begin(), q.end());
  flat.insert(flat.end(), pmom.begin(), pmom.end());
  flat.push_back(p);
  return flat;
}

ChartPoint ChartPoint::from_flat(const ChartSpec& spec, std::span<const double> flat) {
  if (static_cast<int>(flat.size()) != spec.dim())
    throw chart_error("flat coordinate vector has wrong length");
  ChartPoint pt;
  pt.x.assign(flat.begin(), flat.begin() + spec.n());
  pt.q.assign(flat.begin() + spec.n(), flat.begin() + spec.n() + spec.N());
  pt.pmom.assign(flat.begin() + spec.n() + spec.N(), flat.end() - 1);
  pt.p = flat.back();
  return pt;
}

ChartPoint ChartPoint::zero(const ChartSpec& spec) {
  ChartPoint pt;
  pt.x.assign(spec.n(), 0.0);
  pt.q.assign(spec.N(), 0.0);
  pt.pmom.assign(spec.n() * spec.N(), 0.0);
  pt.p = 0.0;
  return pt;
}

}  // namespace dwgeom
