#include "tiqa/commands.hpp"

#include <stdlib.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tiqa/aggregate.hpp"
#include "tiqa/image_io.hpp"
#include "tiqa/report.hpp"

namespace tiqa {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

/// Per-run scratch directory, removed on destruction unless kept.
class TempDir {
 public:
  explicit TempDir(bool keep) : keep_(keep) {}
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    if (!path_.empty() && !keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }

  const fs::path& path() {
    if (path_.empty()) {
      std::string tmpl = (fs::temp_directory_path() / "tangent_iqa-XXXXXX").string();
      if (::mkdtemp(tmpl.data()) == nullptr) {
        throw Error(ErrorKind::io, "cannot create a temporary directory");
      }
      path_ = tmpl;
    }
    return path_;
  }

 private:
  bool keep_;
  fs::path path_;
};

void write_text(const std::optional<fs::path>& target, const std::string& text,
                std::ostream& out) {
  if (!target) {
    out << text;
    return;
  }
  std::ofstream file(*target, std::ios::binary);
  if (!file) throw Error(ErrorKind::io, "cannot write '" + target->string() + "'");
  file << text;
  if (!file) throw Error(ErrorKind::io, "write failed for '" + target->string() + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct CsvRow {
  int line{0};
  std::vector<std::string> fields;
};

/// Minimal comma-separated reader: no quoting, blank lines skipped.
std::vector<CsvRow> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
  std::vector<CsvRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    CsvRow row{line_no, {}};
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') row.fields.emplace_back();
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::format, "'" + path.string() + "' is empty");
  return rows;
}

double parse_number(const std::string& text, int line, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::format, "row " + std::to_string(line) + ": invalid " + what +
                                       " '" + text + "'");
  }
}

ErpImage load_erp(const fs::path& path, const RunConfig& config) {
  return ErpImage(read_image(path), config.allow_any_aspect);
}

int report_failure(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << '\n';
  return kExitFailure;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_tangents(const TangentsArgs& args, const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  try {
    const ErpImage img = load_erp(args.input, config);
    const TangentLayout layout = build_layout(config.level, img.width(), config.padding);
    const auto views = render_all_views(img, layout, config.interp, config.threads);
    fs::create_directories(args.out_dir);
    for (const auto& v : views) {
      write_png(args.out_dir / (view_file_stem(v.plane_index) + ".png"), v.image,
                args.bit_depth);
    }
    write_text(args.out_dir / "layout.json", layout_to_json(layout), out);
    out << "wrote " << views.size() << " views (" << layout.view_dim << "x"
        << layout.view_dim << ") to " << args.out_dir.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_score(const ScoreArgs& args, const RunConfig& config, std::ostream& out,
              std::ostream& err) {
  try {
    if (args.dists.empty()) throw Error(ErrorKind::domain, "score: no images to score");
    const ErpImage ref = load_erp(args.ref, config);
    const TangentLayout layout = build_layout(config.level, ref.width(), config.padding);
    const auto ref_views = render_all_views(ref, layout, config.interp, config.threads);

    TempDir temp(config.keep_temp);
    const bool needs_temp = std::any_of(config.metrics.begin(), config.metrics.end(),
                                        [](const MetricId& m) { return m.is_external(); });

    EvaluateOptions options;
    options.interp = config.interp;
    options.threads = config.threads;
    options.solid_angle_weights = config.solid_angle_weights;
    options.scoring.config = config.metrics_config;
    options.scoring.plugins = &config.plugins;

    bool failed = false;
    std::vector<ScoreResult> results;
    for (std::size_t i = 0; i < args.dists.size(); ++i) {
      ScoreResult r{args.ref.string(), args.dists[i].string(), layout.level,
                    layout.view_dim, {}, {}};
      try {
        const ErpImage dist = load_erp(args.dists[i], config);
        require_same_shape(ref.image(), dist.image(), "score");
        if (needs_temp) {
          options.scoring.temp_dir = temp.path() / ("dist_" + std::to_string(i));
          fs::create_directories(options.scoring.temp_dir);
        }
        const auto dist_views =
            render_all_views(dist, layout, config.interp, config.threads);
        r.outcomes = evaluate_views(ref_views, dist_views, layout, config.metrics, options);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (!r.error.empty()) {
        failed = true;
        err << "error: " << r.dist << ": " << r.error << '\n';
      }
      for (const auto& o : r.outcomes) {
        if (!o.ok()) {
          failed = true;
          err << "error: " << r.dist << ": " << o.error << '\n';
        }
      }
      results.push_back(std::move(r));
    }
    const std::string text = config.format == OutputFormat::csv
                                 ? score_results_to_csv(results, config.metrics)
                                 : score_results_to_json(results);
    write_text(args.out, text, out);
    return failed ? kExitFailure : kExitOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_degrade(const ResizeArgs& args, const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    const ErpImage img = load_erp(args.input, config);
    Image result = degrade(img.image(), DegradeSpec{args.scale, args.kernel, args.sigma});
    if (args.noise > 0.0) result = add_gaussian_noise(result, args.noise, config.seed);
    write_image(args.out, result, args.bit_depth);
    out << "wrote " << result.width() << "x" << result.height() << " to "
        << args.out.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_upsample(const ResizeArgs& args, const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  try {
    const ErpImage img = load_erp(args.input, config);
    const Image result = upsample(img.image(), args.scale, args.kernel);
    write_image(args.out, result, args.bit_depth);
    out << "wrote " << result.width() << "x" << result.height() << " to "
        << args.out.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

int cmd_compare(const CompareArgs& args, const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    const auto rows = read_csv(args.scores_csv);
    const std::vector<std::string> header{"scene", "method", "metric", "value"};
    if (rows.front().fields != header) {
      throw Error(ErrorKind::format, "scores CSV header must be 'scene,method,metric,value'");
    }
    std::vector<std::string> scenes, methods, metrics;
    auto remember = [](std::vector<std::string>& list, const std::string& v) {
      if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    };
    std::map<std::tuple<std::string, std::string, std::string>, double> cells;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.fields.size() != 4 || row.fields[0].empty() || row.fields[1].empty() ||
          row.fields[2].empty()) {
        throw Error(ErrorKind::format,
                    "row " + std::to_string(row.line) + ": expected 4 non-empty fields");
      }
      const double value = parse_number(row.fields[3], row.line, "value");
      remember(scenes, row.fields[0]);
      remember(methods, row.fields[1]);
      remember(metrics, row.fields[2]);
      if (!cells.emplace(std::tuple{row.fields[0], row.fields[1], row.fields[2]}, value)
               .second) {
        throw Error(ErrorKind::format, "row " + std::to_string(row.line) +
                                           ": duplicate score for scene '" + row.fields[0] +
                                           "', method '" + row.fields[1] + "', metric '" +
                                           row.fields[2] + "'");
      }
    }
    if (methods.size() < 2) throw Error(ErrorKind::domain, "compare: need >= 2 methods");

    std::vector<std::string> missing;
    for (const auto& metric : metrics) {
      for (const auto& scene : scenes) {
        for (const auto& method : methods) {
          if (!cells.contains({scene, method, metric})) {
            missing.push_back("scene '" + scene + "', method '" + method + "', metric '" +
                              metric + "'");
          }
        }
      }
    }
    if (!missing.empty()) {
      std::string msg = "compare: missing scores for ";
      for (std::size_t i = 0; i < missing.size(); ++i) {
        msg += (i ? "; " : "") + missing[i];
      }
      throw Error(ErrorKind::incomplete_data, msg);
    }

    ojson json_rows = ojson::array();
    std::ostringstream csv;
    csv << "metric,polarity";
    for (const auto& m : methods) csv << ',' << m;
    csv << '\n';
    for (const auto& metric : metrics) {
      const auto polarity = config.polarity_of(metric);
      if (!polarity) {
        throw Error(ErrorKind::config, "compare: no polarity known for metric '" + metric +
                                           "' (set metric." + metric + ".polarity)");
      }
      Eigen::MatrixXd table(scenes.size(), methods.size());
      for (std::size_t s = 0; s < scenes.size(); ++s) {
        for (std::size_t k = 0; k < methods.size(); ++k) {
          table(s, k) = cells.at({scenes[s], methods[k], metric});
        }
      }
      const Eigen::VectorXd pct = objective_preference(table, *polarity);
      csv << metric << ',' << to_string(*polarity);
      ojson percentages = ojson::object();
      for (std::size_t k = 0; k < methods.size(); ++k) {
        csv << ',' << format_number(pct(k));
        percentages[methods[k]] = pct(k);
      }
      csv << '\n';
      json_rows.push_back({{"metric", metric},
                           {"polarity", to_string(*polarity)},
                           {"percentages", percentages}});
    }
    std::string text;
    if (config.format == OutputFormat::csv) {
      text = csv.str();
    } else {
      const ojson doc = {{"schema_version", kSchemaVersion},
                         {"methods", methods},
                         {"scenes", scenes.size()},
                         {"rows", json_rows}};
      text = doc.dump(2) + "\n";
    }
    write_text(args.out, text, out);
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

namespace {

struct VoteRecord {
  std::string scene;
  std::string a;
  std::string b;
  double votes_a;
  double votes_b;
  double ties;
};

VoteMatrix build_votes(const std::vector<VoteRecord>& records,
                       const std::vector<std::string>& methods) {
  VoteMatrix v = VoteMatrix::zeros(methods);
  for (const auto& r : records) {
    v.add(v.index_of(r.a), v.index_of(r.b), r.votes_a, r.votes_b, r.ties);
  }
  return v;
}

ojson thresholds_json(int n, double alpha) {
  const Thresholds t = significance_thresholds(n, alpha);
  return {{"n", n}, {"k_lo", t.k_lo ? ojson(*t.k_lo) : ojson(nullptr)}, {"k_hi", t.k_hi}};
}

struct GroupSummary {
  ojson json;
  std::vector<std::string> csv_rows;
};

GroupSummary summarize(const VoteMatrix& votes, double alpha, const std::string& scope_scene) {
  GroupSummary g;
  ojson pairs = ojson::array();
  std::map<std::string, std::pair<double, int>> means;
  for (const auto& p : pairwise_preferences(votes, alpha)) {
    const int a = votes.index_of(p.method);
    const int b = votes.index_of(p.opponent);
    const double n = votes.wins(a, b) + votes.wins(b, a) + votes.ties(a, b);
    const int n_int = static_cast<int>(std::lround(n));
    ojson t = thresholds_json(n_int, alpha);
    pairs.push_back({{"method", p.method},
                     {"opponent", p.opponent},
                     {"n", n},
                     {"votes", p.votes},
                     {"ties", votes.ties(a, b)},
                     {"pref_prob", p.pref_prob},
                     {"verdict", to_string(p.verdict)},
                     {"k_lo", t["k_lo"]},
                     {"k_hi", t["k_hi"]}});
    g.csv_rows.push_back("pair," + scope_scene + "," + p.method + "," + p.opponent + "," +
                         format_number(n) + "," + format_number(p.votes) + "," +
                         format_number(votes.ties(a, b)) + "," +
                         format_number(p.pref_prob) + "," + to_string(p.verdict));
    auto& [sum, count] = means[p.method];
    sum += p.pref_prob;
    ++count;
  }
  ojson mean_rows = ojson::array();
  for (const auto& m : votes.methods) {
    const auto it = means.find(m);
    if (it == means.end()) continue;
    const double mean = it->second.first / it->second.second;
    mean_rows.push_back({{"method", m}, {"mean_pref_prob", mean}, {"opponents", it->second.second}});
    g.csv_rows.push_back("mean," + scope_scene + "," + m + ",,,,," + format_number(mean) + ",");
  }
  ojson bt;
  try {
    const BtScores s = bradley_terry(votes);
    ojson strengths = ojson::object();
    for (int k = 0; k < votes.size(); ++k) {
      strengths[votes.methods[k]] = s.strengths(k);
      g.csv_rows.push_back("bt," + scope_scene + "," + votes.methods[k] + ",,,,," +
                           format_number(s.strengths(k)) + ",");
    }
    bt = {{"strengths", strengths},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"warnings", s.warnings}};
  } catch (const Error& e) {
    bt = {{"error", e.what()}};
  }
  g.json = {{"pairs", pairs}, {"mean_over_opponents", mean_rows}, {"bradley_terry", bt}};
  return g;
}

}  // namespace

int cmd_subjective(const SubjectiveArgs& args, const RunConfig& config, std::ostream& out,
                   std::ostream& err) {
  try {
    const auto rows = read_csv(args.votes_csv);
    const std::vector<std::string> with_scene{"scene",   "method_a", "method_b",
                                              "votes_a", "votes_b",  "ties"};
    const std::vector<std::string> without_scene{"method_a", "method_b", "votes_a",
                                                 "votes_b", "ties"};
    const bool has_scene = rows.front().fields == with_scene;
    if (!has_scene && rows.front().fields != without_scene) {
      throw Error(ErrorKind::format,
                  "votes CSV header must be 'scene,method_a,method_b,votes_a,votes_b,ties'");
    }
    const std::size_t width = has_scene ? 6 : 5;
    const int offset = has_scene ? 1 : 0;
    if (args.n && *args.n < 1) throw Error(ErrorKind::domain, "subjective: n must be >= 1");

    std::vector<VoteRecord> records;
    std::vector<std::string> methods, scenes;
    auto remember = [](std::vector<std::string>& list, const std::string& v) {
      if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    };
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      const std::string where = "row " + std::to_string(row.line);
      if (row.fields.size() != width) {
        throw Error(ErrorKind::format, where + ": expected " + std::to_string(width) + " fields");
      }
      VoteRecord r;
      r.scene = has_scene ? row.fields[0] : "";
      r.a = row.fields[offset];
      r.b = row.fields[offset + 1];
      if (r.a.empty() || r.b.empty() || r.a == r.b) {
        throw Error(ErrorKind::format, where + ": need two distinct method names");
      }
      r.votes_a = parse_number(row.fields[offset + 2], row.line, "votes_a");
      r.votes_b = parse_number(row.fields[offset + 3], row.line, "votes_b");
      r.ties = parse_number(row.fields[offset + 4], row.line, "ties");
      if (r.votes_a < 0 || r.votes_b < 0 || r.ties < 0) {
        throw Error(ErrorKind::format, where + ": counts must be non-negative");
      }
      const double total = r.votes_a + r.votes_b + r.ties;
      if (args.n && total != *args.n) {
        throw Error(ErrorKind::format, where + ": votes_a + votes_b + ties = " +
                                           format_number(total) + ", expected n = " +
                                           std::to_string(*args.n));
      }
      if (total <= 0) throw Error(ErrorKind::format, where + ": no votes");
      remember(methods, r.a);
      remember(methods, r.b);
      if (has_scene) remember(scenes, r.scene);
      records.push_back(std::move(r));
    }
    if (records.empty()) throw Error(ErrorKind::format, "votes CSV has no data rows");

    std::vector<std::string> csv_rows;
    VoteMatrix pooled = build_votes(records, methods);
    if (args.n) pooled.n_per_pair = *args.n * static_cast<int>(std::max<std::size_t>(1, scenes.size()));
    GroupSummary pooled_summary = summarize(pooled, config.alpha, "");
    csv_rows.insert(csv_rows.end(), pooled_summary.csv_rows.begin(),
                    pooled_summary.csv_rows.end());

    ojson scene_items = ojson::array();
    for (const auto& scene : scenes) {
      std::vector<VoteRecord> subset;
      for (const auto& r : records) {
        if (r.scene == scene) subset.push_back(r);
      }
      VoteMatrix v = build_votes(subset, methods);
      if (args.n) v.n_per_pair = *args.n;
      GroupSummary s = summarize(v, config.alpha, scene);
      s.json["scene"] = scene;
      scene_items.push_back(std::move(s.json));
      csv_rows.insert(csv_rows.end(), s.csv_rows.begin(), s.csv_rows.end());
    }

    std::string text;
    if (config.format == OutputFormat::csv) {
      text = "scope,scene,method,opponent,n,votes,ties,value,verdict\n";
      for (const auto& r : csv_rows) text += r + "\n";
    } else {
      ojson doc = {{"schema_version", kSchemaVersion}, {"alpha", config.alpha}};
      if (args.n) doc["thresholds"] = thresholds_json(*args.n, config.alpha);
      doc["methods"] = methods;
      doc["pooled"] = pooled_summary.json;
      if (has_scene) doc["scenes"] = scene_items;
      text = doc.dump(2) + "\n";
    }
    write_text(args.out, text, out);
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

}  // namespace tiqa
