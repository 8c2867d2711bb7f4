#include "warpq/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <variant>

namespace warpq::eval {
namespace {

constexpr std::pair<double, double> kMosRange{1.0, 5.0};
constexpr std::pair<double, double> kMushraRange{0.0, 100.0};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Splits one CSV line; double quotes group a field and "" escapes a quote.
std::optional<std::vector<std::string>> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(trim(cur));
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

const char* scale_name(Scale s) { return s == Scale::kMushra ? "mushra" : "mos"; }

const char* level_name(CorrelationLevel l) {
  return l == CorrelationLevel::kPerSample ? "per_sample" : "per_condition";
}

// Order-independent sum: the same multiset always yields the same bits.
double stable_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "correlation: length mismatch");
  if (x.size() < 3) throw Error(ErrorKind::kInvalidArgument, "correlation: need at least 3 points");
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

}  // namespace

std::optional<double> ManifestEntry::subjective_mos() const {
  if (!subjective_score) return std::nullopt;
  return scale == Scale::kMushra ? mushra_to_mos(*subjective_score) : *subjective_score;
}

bool operator==(const ManifestEntry& a, const ManifestEntry& b) {
  return a.ref_path == b.ref_path && a.deg_path == b.deg_path &&
         a.subjective_score == b.subjective_score && a.condition == b.condition &&
         a.scale == b.scale;
}
bool operator==(const FileResult& a, const FileResult& b) {
  return a.entry == b.entry && a.qs == b.qs && a.per_patch == b.per_patch &&
         std::equal(a.diagnostics.begin(), a.diagnostics.end(), b.diagnostics.begin(),
                    b.diagnostics.end(), [](const PatchAlignment& p, const PatchAlignment& q) {
                      return p.start_frame == q.start_frame && p.frames == q.frames &&
                             p.a_star == q.a_star && p.b_star == q.b_star;
                    });
}
bool operator==(const Failure& a, const Failure& b) {
  return a.entry == b.entry && a.kind == b.kind && a.message == b.message;
}
bool operator==(const ConditionSummary& a, const ConditionSummary& b) {
  return a.condition == b.condition && a.count == b.count && a.mean_qs == b.mean_qs &&
         a.mean_subjective == b.mean_subjective;
}

Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "read failed: " + path.string());
  return parse_manifest_text(ss.str(), path.parent_path());
}

Manifest parse_manifest_text(const std::string& text, const std::filesystem::path& base_dir) {
  Manifest manifest;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;

  while (std::getline(lines, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;

    const auto fields = split_csv(stripped);
    if (!have_header) {
      if (!fields || fields->size() != 5 || lower((*fields)[0]) != "ref" ||
          lower((*fields)[1]) != "deg" || lower((*fields)[2]) != "score" ||
          lower((*fields)[3]) != "condition" || lower((*fields)[4]) != "scale")
        throw Error(ErrorKind::kInvalidArgument,
                    "manifest line " + std::to_string(line_no) +
                        ": expected header ref,deg,score,condition,scale");
      have_header = true;
      continue;
    }

    auto skip = [&](const std::string& why) { manifest.skipped.push_back({line_no, why}); };
    if (!fields) { skip("unterminated quote"); continue; }
    if (fields->size() != 5) {
      skip("expected 5 fields, got " + std::to_string(fields->size()));
      continue;
    }
    const auto& f = *fields;
    if (f[0].empty() || f[1].empty()) { skip("empty ref or deg path"); continue; }

    ManifestEntry e;
    e.ref_path = std::filesystem::path(f[0]);
    e.deg_path = std::filesystem::path(f[1]);
    if (e.ref_path.is_relative()) e.ref_path = base_dir / e.ref_path;
    if (e.deg_path.is_relative()) e.deg_path = base_dir / e.deg_path;
    if (!f[3].empty()) e.condition = f[3];

    if (!f[4].empty()) {
      const std::string s = lower(f[4]);
      if (s == "mos") e.scale = Scale::kMos;
      else if (s == "mushra") e.scale = Scale::kMushra;
      else { skip("unknown scale '" + f[4] + "'"); continue; }
    }
    if (!f[2].empty()) {
      const auto v = parse_double(f[2]);
      if (!v) { skip("score is not a number: '" + f[2] + "'"); continue; }
      if (!e.scale) e.scale = Scale::kMos;
      const auto [lo, hi] = e.scale == Scale::kMushra ? kMushraRange : kMosRange;
      if (*v < lo || *v > hi) {
        skip("score " + f[2] + " outside the " + scale_name(*e.scale) + " range");
        continue;
      }
      e.subjective_score = v;
    }
    manifest.entries.push_back(std::move(e));
  }
  if (!have_header) throw Error(ErrorKind::kInvalidArgument, "manifest has no header");
  return manifest;
}

double rescale_linear(double score, std::pair<double, double> src, std::pair<double, double> dst) {
  if (!(src.first < src.second))
    throw Error(ErrorKind::kInvalidArgument, "rescale_linear: degenerate source range");
  return dst.first + (score - src.first) * (dst.second - dst.first) / (src.second - src.first);
}

double mushra_to_mos(double score) { return rescale_linear(score, kMushraRange, kMosRange); }

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (is_constant(x) || is_constant(y))
    throw Error(ErrorKind::kInvalidArgument, "pearson: constant input");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (is_constant(x) || is_constant(y))
    throw Error(ErrorKind::kInvalidArgument, "spearman: constant input");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

unsigned default_parallelism() {
  if (const char* env = std::getenv("WARPQ_JOBS")) {
    unsigned v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EvalReport batch_score(std::span<const ManifestEntry> entries, const WarpQConfig& config,
                       unsigned parallelism) {
  if (entries.empty()) throw Error(ErrorKind::kInvalidArgument, "batch_score: no entries");
  config.validate();

  using Outcome = std::variant<std::monostate, QualityScore, Failure>;
  std::vector<Outcome> outcomes(entries.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      const ManifestEntry& e = entries[i];
      try {
        outcomes[i] = warpq_score(load_waveform(e.ref_path), load_waveform(e.deg_path), config);
      } catch (const Error& err) {
        outcomes[i] = Failure{e, to_string(err.kind()), err.what()};
      } catch (const std::exception& err) {
        outcomes[i] = Failure{e, to_string(ErrorKind::kInternal), err.what()};
      }
    }
  };

  const unsigned threads =
      std::clamp<unsigned>(parallelism, 1u, static_cast<unsigned>(entries.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  EvalReport report;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (auto* qs = std::get_if<QualityScore>(&outcomes[i]))
      report.per_file.push_back({entries[i], qs->qs, std::move(qs->per_patch), std::move(qs->diagnostics)});
    else
      report.failures.push_back(std::get<Failure>(std::move(outcomes[i])));
  }
  report.per_condition = summarize_conditions(report.per_file);
  return report;
}

std::vector<ConditionSummary> summarize_conditions(std::span<const FileResult> results) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : results) {
    if (!r.entry.condition) continue;
    auto& [qs, subj] = groups[*r.entry.condition];
    qs.push_back(r.qs);
    if (auto mos = r.entry.subjective_mos()) subj.push_back(*mos);
  }
  std::vector<ConditionSummary> out;
  for (auto& [name, group] : groups) {
    ConditionSummary s;
    s.condition = name;
    s.count = group.first.size();
    s.mean_qs = stable_mean(group.first);
    if (!group.second.empty()) s.mean_subjective = stable_mean(group.second);
    out.push_back(std::move(s));
  }
  return out;
}

void compute_correlations(EvalReport& report, CorrelationLevel level) {
  report.level = level;
  report.pearson.reset();
  report.spearman.reset();
  std::vector<double> qs, subj;
  if (level == CorrelationLevel::kPerCondition) {
    for (const auto& c : report.per_condition)
      if (c.mean_subjective) {
        qs.push_back(c.mean_qs);
        subj.push_back(*c.mean_subjective);
      }
  } else {
    for (const auto& r : report.per_file)
      if (auto mos = r.entry.subjective_mos()) {
        qs.push_back(r.qs);
        subj.push_back(*mos);
      }
  }
  report.correlation_points = qs.size();
  if (qs.size() < 3 || is_constant(qs) || is_constant(subj)) return;
  report.pearson = pearson(qs, subj);
  report.spearman = spearman(qs, subj);
}

namespace {

nlohmann::json entry_to_json(const ManifestEntry& e) {
  nlohmann::json j;
  j["ref"] = e.ref_path.string();
  j["deg"] = e.deg_path.string();
  j["score"] = e.subjective_score ? nlohmann::json(*e.subjective_score) : nlohmann::json(nullptr);
  j["condition"] = e.condition ? nlohmann::json(*e.condition) : nlohmann::json(nullptr);
  j["scale"] = e.scale ? nlohmann::json(scale_name(*e.scale)) : nlohmann::json(nullptr);
  return j;
}

ManifestEntry entry_from_json(const nlohmann::json& j) {
  ManifestEntry e;
  e.ref_path = j.at("ref").get<std::string>();
  e.deg_path = j.at("deg").get<std::string>();
  if (!j.at("score").is_null()) e.subjective_score = j.at("score").get<double>();
  if (!j.at("condition").is_null()) e.condition = j.at("condition").get<std::string>();
  if (!j.at("scale").is_null())
    e.scale = j.at("scale").get<std::string>() == "mushra" ? Scale::kMushra : Scale::kMos;
  return e;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report, bool include_diagnostics) {
  nlohmann::json j;
  j["correlation_level"] = level_name(report.level);
  j["pearson"] = opt_json(report.pearson);
  j["spearman"] = opt_json(report.spearman);
  j["correlation_points"] = report.correlation_points;

  j["per_file"] = nlohmann::json::array();
  for (const auto& r : report.per_file) {
    nlohmann::json f = entry_to_json(r.entry);
    f["subjective_mos"] = opt_json(r.entry.subjective_mos());
    f["qs"] = r.qs;
    if (include_diagnostics) {
      f["per_patch"] = r.per_patch;
      nlohmann::json diag = nlohmann::json::array();
      for (const auto& d : r.diagnostics)
        diag.push_back({{"start_frame", d.start_frame}, {"frames", d.frames},
                        {"a_star", d.a_star}, {"b_star", d.b_star}});
      f["diagnostics"] = std::move(diag);
    }
    j["per_file"].push_back(std::move(f));
  }

  j["per_condition"] = nlohmann::json::array();
  for (const auto& c : report.per_condition)
    j["per_condition"].push_back({{"condition", c.condition},
                                  {"count", c.count},
                                  {"mean_qs", c.mean_qs},
                                  {"mean_subjective", opt_json(c.mean_subjective)}});

  j["failures"] = nlohmann::json::array();
  for (const auto& f : report.failures) {
    nlohmann::json o = entry_to_json(f.entry);
    o["kind"] = f.kind;
    o["message"] = f.message;
    j["failures"].push_back(std::move(o));
  }
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport report;
  report.level = j.at("correlation_level").get<std::string>() == "per_sample"
                     ? CorrelationLevel::kPerSample
                     : CorrelationLevel::kPerCondition;
  report.pearson = opt_from_json(j.at("pearson"));
  report.spearman = opt_from_json(j.at("spearman"));
  report.correlation_points = j.at("correlation_points").get<std::size_t>();

  for (const auto& f : j.at("per_file")) {
    FileResult r;
    r.entry = entry_from_json(f);
    r.qs = f.at("qs").get<double>();
    if (f.contains("per_patch")) r.per_patch = f.at("per_patch").get<std::vector<double>>();
    if (f.contains("diagnostics"))
      for (const auto& d : f.at("diagnostics"))
        r.diagnostics.push_back({d.at("start_frame").get<Eigen::Index>(), d.at("frames").get<Eigen::Index>(),
                                 d.at("a_star").get<Eigen::Index>(), d.at("b_star").get<Eigen::Index>()});
    report.per_file.push_back(std::move(r));
  }
  for (const auto& c : j.at("per_condition"))
    report.per_condition.push_back({c.at("condition").get<std::string>(), c.at("count").get<std::size_t>(),
                                    c.at("mean_qs").get<double>(), opt_from_json(c.at("mean_subjective"))});
  for (const auto& f : j.at("failures"))
    report.failures.push_back(
        {entry_from_json(f), f.at("kind").get<std::string>(), f.at("message").get<std::string>()});
  return report;
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "ref,deg,condition,subjective,qs\n";
  for (const auto& r : report.per_file)
    out << csv_field(r.entry.ref_path.string()) << ',' << csv_field(r.entry.deg_path.string()) << ','
        << csv_field(r.entry.condition.value_or("")) << ',' << opt_double(r.entry.subjective_mos())
        << ',' << format_double(r.qs) << '\n';

  out << "\n# per_condition\ncondition,count,mean_qs,mean_subjective\n";
  for (const auto& c : report.per_condition)
    out << csv_field(c.condition) << ',' << c.count << ',' << format_double(c.mean_qs) << ','
        << opt_double(c.mean_subjective) << '\n';

  out << "\n# summary\nkey,value\n"
      << "correlation_level," << level_name(report.level) << '\n'
      << "pearson," << opt_double(report.pearson) << '\n'
      << "spearman," << opt_double(report.spearman) << '\n'
      << "correlation_points," << report.correlation_points << '\n'
      << "scored," << report.per_file.size() << '\n'
      << "failed," << report.failures.size() << '\n';

  if (!report.failures.empty()) {
    out << "\n# failures\nref,deg,kind,message\n";
    for (const auto& f : report.failures)
      out << csv_field(f.entry.ref_path.string()) << ',' << csv_field(f.entry.deg_path.string())
          << ',' << f.kind << ',' << csv_field(f.message) << '\n';
  }
  return out.str();
}

void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path,
                 bool include_diagnostics) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write report to " + path.string());
  if (format == ReportFormat::kJson)
    out << report_to_json(report, include_diagnostics).dump(2) << '\n';
  else
    out << report_to_csv(report);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace warpq::eval
