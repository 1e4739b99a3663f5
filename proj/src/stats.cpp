#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

#include "popproto/errors.hpp"
#include "popproto/experiment.hpp"

namespace popproto {

double nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidParameter("nearest_rank of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // The epsilon keeps q·N that is integral in exact arithmetic from rounding up.
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

PointSummary summarize_values(const std::vector<std::optional<double>>& values) {
  PointSummary s;
  std::vector<double> kept;
  for (const auto& v : values) {
    ++s.runs;
    if (v)
      kept.push_back(*v);
    else
      ++s.capped;
  }
  s.uncapped = kept.size();
  s.warning = s.capped > 0;
  if (!kept.empty()) {
    double sum = 0.0;
    for (double v : kept) sum += v;
    s.mean = sum / static_cast<double>(kept.size());
    s.median = nearest_rank(kept, 0.5);
    s.p95 = nearest_rank(kept, 0.95);
  }
  return s;
}

std::vector<PointSummary> summarize(const std::vector<RunRecord>& records, const std::string& layer) {
  if (records.empty()) throw InvalidParameter("no records to summarize");
  std::vector<std::string> order;
  std::map<std::string, std::pair<GraphDescriptor, std::vector<std::optional<double>>>> groups;
  for (const auto& r : records) {
    GraphDescriptor key_graph = r.graph;
    key_graph.seed.reset();
    const std::string key = r.stack + "|" + to_json(key_graph).dump();
    auto [it, fresh] = groups.try_emplace(key, key_graph, std::vector<std::optional<double>>{});
    if (fresh) order.push_back(key);

    std::optional<std::uint64_t> steps;
    if (layer.empty()) {
      steps = r.top_steps();
    } else {
      auto found = std::find_if(r.steps.begin(), r.steps.end(),
                                [&](const LayerOutcome& o) { return o.layer == layer; });
      if (found == r.steps.end()) throw InvalidParameter("record has no layer '" + layer + "'");
      steps = found->steps;
    }
    it->second.second.push_back(steps ? std::optional<double>(static_cast<double>(*steps))
                                      : std::nullopt);
  }
  std::vector<PointSummary> out;
  for (const auto& key : order) {
    auto& [graph, values] = groups.at(key);
    PointSummary s = summarize_values(values);
    s.graph = graph;
    out.push_back(s);
  }
  return out;
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw FitError("fit needs as many y values as x values");
  if (std::set<double>(x.begin(), x.end()).size() < 3)
    throw FitError("fit needs at least three distinct x values");
  const std::size_t k = x.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitError("log-log fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  for (std::size_t i = 0; i < k; ++i) fit.points.push_back({x[i], y[i], y[i]});
  return fit;
}

ScalingFit fit_scaling(const std::vector<PointSummary>& points) {
  std::vector<double> x, y;
  std::set<std::size_t> seen;
  for (const auto& p : points) {
    if (!seen.insert(p.graph.n).second)
      throw FitError("more than one point with n = " + std::to_string(p.graph.n));
    if (p.uncapped < 5)
      throw FitError("point n = " + std::to_string(p.graph.n) + " has fewer than 5 uncapped runs");
    if (10 * p.capped > p.runs)
      throw FitError("point n = " + std::to_string(p.graph.n) + " has more than 10% capped runs");
    x.push_back(static_cast<double>(p.graph.n));
    y.push_back(p.mean);
  }
  ScalingFit fit = fit_power_law(x, y);
  for (std::size_t i = 0; i < points.size(); ++i) fit.points[i].p95 = points[i].p95;
  return fit;
}

void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& points) {
  out << "family,n,k,delta_cap,runs,capped,mean_steps,median_steps,p95_steps,warning\n";
  out << std::setprecision(12);
  for (const auto& p : points)
    out << family_name(p.graph.family) << ',' << p.graph.n << ',' << p.graph.k << ','
        << p.graph.delta_cap << ',' << p.runs << ',' << p.capped << ',' << p.mean << ','
        << p.median << ',' << p.p95 << ',' << (p.warning ? "capped-excluded" : "") << '\n';
}

void write_fit_csv(std::ostream& out, const std::vector<PointSummary>& points, const ScalingFit& fit) {
  out << "n,runs,capped,mean_steps,median_steps,p95_steps,slope,intercept,r_squared\n";
  out << std::setprecision(12);
  for (const auto& p : points)
    out << p.graph.n << ',' << p.runs << ',' << p.capped << ',' << p.mean << ',' << p.median << ','
        << p.p95 << ',' << fit.slope << ',' << fit.intercept << ',' << fit.r_squared << '\n';
}

}  // namespace popproto
