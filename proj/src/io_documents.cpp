#include <json.hpp>

#include <set>
#include <sstream>

#include "scendi/io.hpp"

namespace scendi::io {

using nlohmann::json;

namespace {

// Minimal RFC 4180 field splitter: quoted fields may contain commas and
// doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field", "manifest");
  fields.push_back(std::move(cur));
  return fields;
}

Eigen::Index parse_index(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("manifest " + what + " '" + s + "' is not an integer", "manifest");
  }
  if (pos != s.size()) {
    throw ValidationError("manifest " + what + " '" + s + "' is not an integer", "manifest");
  }
  return static_cast<Eigen::Index>(v);
}

std::filesystem::path resolve_relative(const std::filesystem::path& base,
                                       const std::filesystem::path& p) {
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

PairManifest manifest_from_json(const json& j, const std::filesystem::path& base) {
  PairManifest m;
  if (!j.is_object()) throw ValidationError("manifest JSON must be an object", "manifest");
  if (j.contains("schema") && j.at("schema") != kManifestSchema) {
    throw ValidationError("unsupported manifest schema " + j.at("schema").dump(), "manifest");
  }
  if (j.contains("image_matrix") && !j.at("image_matrix").is_null()) {
    m.image_matrix = resolve_relative(base, j.at("image_matrix").get<std::string>());
  }
  if (j.contains("text_matrix") && !j.at("text_matrix").is_null()) {
    m.text_matrix = resolve_relative(base, j.at("text_matrix").get<std::string>());
  }
  if (!j.contains("records") || !j.at("records").is_array()) {
    throw ValidationError("manifest has no 'records' array", "manifest");
  }
  for (const auto& r : j.at("records")) {
    PairRecord rec;
    rec.prompt = r.value("prompt", std::string{});
    if (!r.contains("image_row") || !r.contains("text_row")) {
      throw ValidationError("manifest record lacks image_row/text_row", "manifest");
    }
    if (!r.at("image_row").is_number_integer() || !r.at("text_row").is_number_integer()) {
      throw ValidationError("manifest row indices must be integers", "manifest");
    }
    rec.image_row = r.at("image_row").get<Eigen::Index>();
    rec.text_row = r.at("text_row").get<Eigen::Index>();
    if (r.contains("group") && !r.at("group").is_null()) {
      rec.group = r.at("group").get<std::string>();
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

PairManifest manifest_from_csv(const std::string& text) {
  PairManifest m;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ValidationError("manifest CSV row has " + std::to_string(fields.size()) +
                                " fields, header has " + std::to_string(header.size()),
                            "manifest");
    }
    PairRecord rec;
    bool have_img = false;
    bool have_txt = false;
    for (std::size_t k = 0; k < header.size(); ++k) {
      const auto& col = header[k];
      if (col == "prompt") {
        rec.prompt = fields[k];
      } else if (col == "image_row") {
        rec.image_row = parse_index(fields[k], "image_row");
        have_img = true;
      } else if (col == "text_row") {
        rec.text_row = parse_index(fields[k], "text_row");
        have_txt = true;
      } else if (col == "group") {
        if (!fields[k].empty()) rec.group = fields[k];
      }
    }
    if (!have_img || !have_txt) {
      throw ValidationError("manifest CSV needs image_row and text_row columns", "manifest");
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

}  // namespace

PairManifest load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool is_json =
      path.extension() == ".json" || (first != std::string::npos && text[first] == '{');
  PairManifest m;
  if (is_json) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError("malformed manifest JSON '" + path.string() + "': " + e.what(),
                            "manifest");
    }
    try {
      m = manifest_from_json(j, path.parent_path());
    } catch (const json::exception& e) {
      throw ValidationError("bad manifest '" + path.string() + "': " + e.what(), "manifest");
    }
  } else {
    m = manifest_from_csv(text);
  }
  if (m.records.empty()) throw ValidationError("manifest has no records", "manifest");
  return m;
}

void save_manifest(const PairManifest& m, const std::filesystem::path& path) {
  json j;
  j["schema"] = kManifestSchema;
  j["image_matrix"] = m.image_matrix ? json(m.image_matrix->string()) : json(nullptr);
  j["text_matrix"] = m.text_matrix ? json(m.text_matrix->string()) : json(nullptr);
  j["records"] = json::array();
  for (const auto& r : m.records) {
    json rec = {{"prompt", r.prompt}, {"image_row", r.image_row}, {"text_row", r.text_row}};
    rec["group"] = r.group ? json(*r.group) : json(nullptr);
    j["records"].push_back(std::move(rec));
  }
  write_file(path, j.dump(2) + "\n");
}

void validate_manifest(const PairManifest& m, Eigen::Index image_rows,
                       Eigen::Index text_rows) {
  if (m.records.empty()) throw ValidationError("manifest has no records", "manifest");
  std::set<Eigen::Index> seen;
  for (std::size_t k = 0; k < m.records.size(); ++k) {
    const auto& r = m.records[k];
    if (r.image_row < 0 || r.image_row >= image_rows) {
      throw ValidationError("record " + std::to_string(k) + ": image_row " +
                                std::to_string(r.image_row) + " out of range [0, " +
                                std::to_string(image_rows) + ")",
                            "manifest_bounds");
    }
    if (r.text_row < 0 || r.text_row >= text_rows) {
      throw ValidationError("record " + std::to_string(k) + ": text_row " +
                                std::to_string(r.text_row) + " out of range [0, " +
                                std::to_string(text_rows) + ")",
                            "manifest_bounds");
    }
    if (!seen.insert(r.image_row).second) {
      throw ValidationError("record " + std::to_string(k) + ": duplicate image_row " +
                                std::to_string(r.image_row),
                            "manifest_duplicate");
    }
    if (r.group && r.group->empty()) {
      throw ValidationError("record " + std::to_string(k) + ": empty group label", "manifest");
    }
  }
}

PairManifest identity_manifest(Eigen::Index n) {
  PairManifest m;
  m.records.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) m.records.push_back({{}, i, i, std::nullopt});
  return m;
}

Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
  }
  return out;
}

std::vector<Eigen::Index> image_rows(const PairManifest& m) {
  std::vector<Eigen::Index> out;
  for (const auto& r : m.records) out.push_back(r.image_row);
  return out;
}

std::vector<Eigen::Index> text_rows(const PairManifest& m) {
  std::vector<Eigen::Index> out;
  for (const auto& r : m.records) out.push_back(r.text_row);
  return out;
}

// ------------------------------------------------------------------ reports

void RunConfig::validate() const {
  kernel.validate();
  if (!(rel_cutoff >= 0.0 && rel_cutoff < 1.0)) {
    throw ValidationError("rel_cutoff must lie in [0, 1)", "config");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ValidationError("ridge must be a non-negative finite number", "config");
  }
}

namespace {

json config_to_json(const RunConfig& c) {
  return {{"kernel", std::string(to_string(c.kernel.kind))},
          {"sigma", c.kernel.sigma ? json(*c.kernel.sigma) : json(nullptr)},
          {"rff_dim", c.kernel.rff_dim},
          {"seed", c.kernel.seed},
          {"normalize_input", c.kernel.normalize_input},
          {"rel_cutoff", c.rel_cutoff},
          {"ridge", c.ridge},
          {"center", c.center},
          {"renormalize", c.renormalize},
          {"outputs", c.outputs}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.kernel.kind = parse_kernel_kind(j.at("kernel").get<std::string>());
  if (!j.at("sigma").is_null()) c.kernel.sigma = j.at("sigma").get<double>();
  c.kernel.rff_dim = j.at("rff_dim").get<int>();
  c.kernel.seed = j.at("seed").get<std::uint64_t>();
  c.kernel.normalize_input = j.at("normalize_input").get<bool>();
  c.rel_cutoff = j.at("rel_cutoff").get<double>();
  c.ridge = j.at("ridge").get<double>();
  c.center = j.at("center").get<bool>();
  c.renormalize = j.at("renormalize").get<bool>();
  c.outputs = j.at("outputs").get<std::vector<std::string>>();
  return c;
}

}  // namespace

std::string report_to_json(const ReportDocument& doc, int indent) {
  const auto& r = doc.report;
  json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = doc.tool_version;
  j["created_at"] = doc.created_at;
  j["config"] = config_to_json(doc.config);
  // The kernel used for scoring, with the resolved bandwidth.
  RunConfig used = doc.config;
  used.kernel = r.kernel_config;
  j["kernel_used"] = config_to_json(used);
  j["kernel_used"].erase("outputs");
  j["inputs"] = json::array();
  for (const auto& in : doc.inputs) {
    j["inputs"].push_back({{"role", in.role},
                           {"path", in.path},
                           {"sha256", in.sha256},
                           {"rows", in.rows},
                           {"cols", in.cols}});
  }
  j["n"] = r.n;
  j["feature_dim"] = r.feature_dim;
  j["scores"] = {{"vendi", r.vendi},
                 {"rke", r.rke},
                 {"scendi_i", r.scendi_i},
                 {"scendi_t", r.scendi_t}};
  j["traces"] = {{"trace_i", r.trace_i}, {"trace_t", r.trace_t}};
  j["spectra"] = {{"c_ii", r.spectrum_ii},
                  {"lambda_i", r.spectrum_lambda_i},
                  {"lambda_t", r.spectrum_lambda_t}};
  return j.dump(indent) + "\n";
}

ReportDocument report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what(), "report");
  }
  try {
    if (j.at("schema") != kReportSchema) {
      throw ValidationError("unsupported report schema " + j.at("schema").dump(), "report");
    }
    ReportDocument doc;
    doc.tool_version = j.at("tool_version").get<std::string>();
    doc.created_at = j.at("created_at").get<std::string>();
    doc.config = config_from_json(j.at("config"));
    for (const auto& in : j.at("inputs")) {
      doc.inputs.push_back({in.at("role").get<std::string>(), in.at("path").get<std::string>(),
                            in.at("sha256").get<std::string>(),
                            in.at("rows").get<Eigen::Index>(),
                            in.at("cols").get<Eigen::Index>()});
    }
    auto& r = doc.report;
    r.kernel_config = config_from_json([&] {
                        json k = j.at("kernel_used");
                        k["outputs"] = json::array();
                        return k;
                      }())
                          .kernel;
    r.n = j.at("n").get<Eigen::Index>();
    r.feature_dim = j.at("feature_dim").get<Eigen::Index>();
    const auto& s = j.at("scores");
    r.vendi = s.at("vendi").get<double>();
    r.rke = s.at("rke").get<double>();
    r.scendi_i = s.at("scendi_i").get<double>();
    r.scendi_t = s.at("scendi_t").get<double>();
    r.trace_i = j.at("traces").at("trace_i").get<double>();
    r.trace_t = j.at("traces").at("trace_t").get<double>();
    const auto& sp = j.at("spectra");
    r.spectrum_ii = sp.at("c_ii").get<std::vector<double>>();
    r.spectrum_lambda_i = sp.at("lambda_i").get<std::vector<double>>();
    r.spectrum_lambda_t = sp.at("lambda_t").get<std::vector<double>>();
    return doc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad report JSON: ") + e.what(), "report");
  }
}

void write_report(const ReportDocument& doc, const std::filesystem::path& path) {
  write_file(path, report_to_json(doc));
}

ReportDocument read_report(const std::filesystem::path& path) {
  return report_from_json(read_file(path));
}

}  // namespace scendi::io
