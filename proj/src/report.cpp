#include "tiqa/report.hpp"

#include <array>
#include <charconv>
#include <sstream>

#include "json.hpp"

namespace tiqa {

using ojson = nlohmann::ordered_json;

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

namespace {

ojson vec_json(const Vec3d& v) { return ojson::array({v.x(), v.y(), v.z()}); }

ojson report_json(const TMetricReport& r) {
  ojson per_view = ojson::array();
  for (const auto& [index, value] : r.per_view) per_view.push_back(value);
  return {
      {"metric", r.metric.id.name()},
      {"polarity", to_string(r.metric.polarity)},
      {"t_value", r.t_value},
      {"min", r.stats.min},
      {"max", r.stats.max},
      {"stddev", r.stats.stddev},
      {"per_view", per_view},
  };
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string layout_to_json(const TangentLayout& layout) {
  ojson planes = ojson::array();
  for (const auto& p : layout.planes) {
    planes.push_back({{"center", vec_json(p.center)},
                      {"u", vec_json(p.basis_u)},
                      {"v", vec_json(p.basis_v)},
                      {"fov", p.fov}});
  }
  const ojson doc = {{"schema_version", kSchemaVersion},
                     {"level", layout.level},
                     {"view_dim", layout.view_dim},
                     {"planes", planes}};
  return doc.dump(2) + "\n";
}

std::string score_results_to_json(const std::vector<ScoreResult>& results) {
  ojson items = ojson::array();
  for (const auto& r : results) {
    ojson reports = ojson::array();
    ojson errors = ojson::array();
    for (const auto& o : r.outcomes) {
      if (o.ok()) {
        reports.push_back(report_json(*o.report));
      } else {
        errors.push_back({{"metric", o.metric.name()}, {"message", o.error}});
      }
    }
    if (!r.error.empty()) errors.push_back({{"metric", nullptr}, {"message", r.error}});
    items.push_back({{"ref", r.ref},
                     {"dist", r.dist},
                     {"level", r.level},
                     {"view_dim", r.view_dim},
                     {"reports", reports},
                     {"errors", errors}});
  }
  const ojson doc = {{"schema_version", kSchemaVersion}, {"results", items}};
  return doc.dump(2) + "\n";
}

std::string score_results_to_csv(const std::vector<ScoreResult>& results,
                                 const std::vector<MetricId>& metrics) {
  std::ostringstream out;
  out << "ref,dist,metric,polarity,level,view_dim,t_value,min,max,stddev,status\n";
  for (const auto& r : results) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      out << csv_field(r.ref) << ',' << csv_field(r.dist) << ','
          << csv_field(metrics[m].name()) << ',';
      const MetricOutcome* o = m < r.outcomes.size() ? &r.outcomes[m] : nullptr;
      if (o && o->ok()) {
        const auto& rep = *o->report;
        out << to_string(rep.metric.polarity) << ',' << r.level << ',' << r.view_dim
            << ',' << format_number(rep.t_value) << ',' << format_number(rep.stats.min)
            << ',' << format_number(rep.stats.max) << ','
            << format_number(rep.stats.stddev) << ",ok\n";
      } else {
        out << ',' << r.level << ',' << r.view_dim << ",,,,,error\n";
      }
    }
  }
  return out.str();
}

}  // namespace tiqa
