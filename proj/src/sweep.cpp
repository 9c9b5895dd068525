#include "scendi/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace scendi {

std::vector<std::string> manifest_groups(const io::PairManifest& m) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < m.records.size(); ++k) {
    const auto& g = m.records[k].group;
    if (!g || g->empty()) {
      throw ValidationError("sweep record " + std::to_string(k) + " has no group", "sweep");
    }
    if (seen.insert(*g).second) out.push_back(*g);
  }
  return out;
}

void validate_sweep(const io::PairManifest& m, const SweepSpec& spec) {
  const auto groups = manifest_groups(m);
  const std::set<std::string> present(groups.begin(), groups.end());
  std::set<std::string> listed;
  for (const auto& g : spec.order) {
    if (!present.contains(g)) throw ValidationError("sweep order names unknown group '" + g + "'", "sweep");
    if (!listed.insert(g).second) throw ValidationError("sweep order repeats group '" + g + "'", "sweep");
  }
  if (listed.size() != present.size()) {
    throw ValidationError("sweep order must list all " + std::to_string(present.size()) +
                              " groups exactly once",
                          "sweep");
  }
}

std::vector<SweepRow> run_sweep(const EmbeddingMatrix& image, const EmbeddingMatrix& text,
                                const io::PairManifest& m, const SweepSpec& spec,
                                const KernelConfig& kernel, const DecomposeOptions& opts,
                                int threads) {
  if (static_cast<std::size_t>(image.rows()) != m.records.size() ||
      image.rows() != text.rows()) {
    throw ValidationError("feature rows do not match manifest records", "pairing");
  }
  validate_sweep(m, spec);
  std::map<std::string, std::size_t> rank;
  for (std::size_t k = 0; k < spec.order.size(); ++k) rank[spec.order[k]] = k;

  // Rows of each point, kept in manifest order.
  const std::size_t points = spec.order.size();
  std::vector<std::vector<Eigen::Index>> members(points);
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t r = 0; r < m.records.size(); ++r) {
      const std::size_t g = rank.at(*m.records[r].group);
      if (spec.cumulative ? g <= p : g == p) members[p].push_back(static_cast<Eigen::Index>(r));
    }
  }

  const auto score_point = [&](std::size_t p) {
    const PairedFeatures phi = paired_features(io::select_rows(image, members[p]),
                                               io::select_rows(text, members[p]), kernel);
    const DiversityReport rep = evaluate(phi.image, phi.text, opts);
    SweepRow row;
    row.group_count = static_cast<int>(p + 1);
    row.group = spec.order[p];
    row.vendi = rep.vendi;
    row.rke = rep.rke;
    row.scendi_i = rep.scendi_i;
    row.scendi_t = rep.scendi_t;
    row.trace_i = rep.trace_i;
    return row;
  };

  std::vector<SweepRow> rows(points);
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < points; start += workers) {
    const std::size_t stop = std::min(points, start + workers);
    if (workers == 1) {
      rows[start] = score_point(start);
      continue;
    }
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t p = start; p < stop; ++p) {
      batch.push_back(std::async(std::launch::async, score_point, p));
    }
    for (std::size_t p = start; p < stop; ++p) rows[p] = batch[p - start].get();
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "group_count,vendi,rke,scendi_i,scendi_t,trace_i,group\n";
  char buf[32];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.group_count << ',' << num(r.vendi) << ',' << num(r.rke) << ',' << num(r.scendi_i)
       << ',' << num(r.scendi_t) << ',' << num(r.trace_i) << ',' << r.group << '\n';
  }
  return os.str();
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("spearman needs two equal-length series of length >= 2", "shape");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace scendi
