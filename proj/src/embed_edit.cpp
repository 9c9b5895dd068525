#include "scendi/embed_edit.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "scendi/io.hpp"

namespace scendi {

namespace {

void require_dims(Eigen::Index a, Eigen::Index b, std::string_view what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(os.str(), "shape");
  }
}

void renormalize_rows(Matrix& rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0.0) rows.row(i) /= norm;
  }
}

const std::string kNpySuffix = ".gamma.npy";
const std::string kJsonSuffix = ".gamma.json";

std::filesystem::path strip_suffix(const std::filesystem::path& p) {
  const std::string s = p.string();
  for (const auto& suffix : {kNpySuffix, kJsonSuffix}) {
    if (s.size() > suffix.size() && s.ends_with(suffix)) {
      return s.substr(0, s.size() - suffix.size());
    }
  }
  return p;
}

}  // namespace

Modifier fit_modifier(const FeatureMatrix& image, const FeatureMatrix& text,
                      const DecomposeOptions& opts, std::string corpus) {
  Modifier m;
  m.gamma_star = gamma_star(image, text, opts);
  m.kernel_config = image.config;
  m.fitted_on = std::move(corpus);
  m.rel_cutoff = opts.rel_cutoff;
  return m;
}

Vector modify(const Vector& x_i, const Vector& x_t, const Modifier& m, bool renormalize) {
  require_dims(x_i.size(), m.dim(), "modify (image)");
  require_dims(x_t.size(), m.gamma_star.cols(), "modify (text)");
  Vector out = x_i - m.gamma_star * x_t;
  if (renormalize && out.norm() > 0.0) out.normalize();
  return out;
}

Matrix modify_rows(const Matrix& image_rows, const Matrix& text_rows, const Modifier& m,
                   bool renormalize) {
  require_dims(image_rows.rows(), text_rows.rows(), "modify (row count)");
  require_dims(image_rows.cols(), m.dim(), "modify (image)");
  require_dims(text_rows.cols(), m.gamma_star.cols(), "modify (text)");
  Matrix out = residuals(image_rows, text_rows, m.gamma_star);
  if (renormalize) renormalize_rows(out);
  return out;
}

Vector naive_modify(const Vector& x_i, const Vector& x_t, bool renormalize) {
  require_dims(x_i.size(), x_t.size(), "naive_modify");
  Vector out = x_i - x_t;
  if (renormalize && out.norm() > 0.0) out.normalize();
  return out;
}

Matrix naive_modify_rows(const Matrix& image_rows, const Matrix& text_rows, bool renormalize) {
  require_dims(image_rows.rows(), text_rows.rows(), "naive_modify (row count)");
  require_dims(image_rows.cols(), text_rows.cols(), "naive_modify");
  Matrix out = image_rows - text_rows;
  if (renormalize) renormalize_rows(out);
  return out;
}

std::vector<RetrievalHit> retrieve_topk(const Vector& query, const Matrix& gallery,
                                        Eigen::Index k) {
  if (gallery.rows() == 0) throw ValidationError("retrieval gallery is empty", "shape");
  require_dims(query.size(), gallery.cols(), "retrieve_topk");
  if (k < 1 || k > gallery.rows()) {
    throw ValidationError("k must lie in [1, " + std::to_string(gallery.rows()) + "]", "config");
  }
  const double qn = query.norm();
  std::vector<RetrievalHit> hits(static_cast<std::size_t>(gallery.rows()));
  for (Eigen::Index i = 0; i < gallery.rows(); ++i) {
    const double gn = gallery.row(i).norm();
    const double s = (qn > 0.0 && gn > 0.0) ? gallery.row(i).dot(query) / (qn * gn) : 0.0;
    hits[static_cast<std::size_t>(i)] = {i, s};
  }
  const auto better = [](const RetrievalHit& a, const RetrievalHit& b) {
    return a.score != b.score ? a.score > b.score : a.index < b.index;
  };
  std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), better);
  hits.resize(static_cast<std::size_t>(k));
  return hits;
}

std::filesystem::path modifier_npy_path(const std::filesystem::path& prefix) {
  return strip_suffix(prefix).string() + kNpySuffix;
}

std::filesystem::path modifier_json_path(const std::filesystem::path& prefix) {
  return strip_suffix(prefix).string() + kJsonSuffix;
}

void save_modifier(const Modifier& m, const std::filesystem::path& prefix) {
  using nlohmann::json;
  io::save_matrix(m.gamma_star, modifier_npy_path(prefix));
  const auto& k = m.kernel_config;
  json j = {{"kernel", std::string(to_string(k.kind))},
            {"sigma", k.sigma ? json(*k.sigma) : json(nullptr)},
            {"rff_dim", k.rff_dim},
            {"seed", k.seed},
            {"rel_cutoff", m.rel_cutoff},
            {"corpus", m.fitted_on},
            {"created_at", m.created_at.empty() ? io::utc_timestamp() : m.created_at}};
  if (k.normalize_input) j["normalize_input"] = true;
  io::write_file(modifier_json_path(prefix), j.dump(2) + "\n");
}

Modifier load_modifier(const std::filesystem::path& prefix) {
  using nlohmann::json;
  Modifier m;
  m.gamma_star = io::read_npy(modifier_npy_path(prefix));
  if (m.gamma_star.rows() != m.gamma_star.cols()) {
    throw ValidationError("modifier matrix must be square", "shape");
  }
  json j;
  try {
    j = json::parse(io::read_file(modifier_json_path(prefix)));
    auto& k = m.kernel_config;
    k.kind = parse_kernel_kind(j.at("kernel").get<std::string>());
    if (!j.at("sigma").is_null()) k.sigma = j.at("sigma").get<double>();
    k.rff_dim = j.at("rff_dim").get<int>();
    k.seed = j.at("seed").get<std::uint64_t>();
    k.normalize_input = j.value("normalize_input", false);
    m.rel_cutoff = j.at("rel_cutoff").get<double>();
    m.fitted_on = j.at("corpus").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError("bad modifier sidecar '" + modifier_json_path(prefix).string() +
                              "': " + e.what(),
                          "modifier");
  }
  return m;
}

}  // namespace scendi
