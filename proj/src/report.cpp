#include "colorgpt/report.hpp"

#include <fstream>
#include <sstream>

#include "colorgpt/codec.hpp"
#include "colorgpt/document.hpp"
#include "colorgpt/errors.hpp"

namespace colorgpt {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<ElementKind, 4> kElementOrder{ElementKind::Text, ElementKind::ColoredBackground,
                                                    ElementKind::Svg, ElementKind::Raster};

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : round2(100.0 * static_cast<double>(part) / static_cast<double>(whole));
}

SummaryStat rounded(SummaryStat s) {
  s.mean = round2(s.mean);
  s.std = round2(s.std);
  return s;
}

ojson hex_list(const std::vector<Color>& colors) {
  ojson a = ojson::array();
  for (Color c : colors) a.push_back(color_to_hex(c));
  return a;
}

std::vector<Color> colors_from(const ojson& a) {
  std::vector<Color> out;
  for (const auto& v : a) out.push_back(hex_to_color(v.get<std::string>()));
  return out;
}

ojson stat_json(const SummaryStat& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

SummaryStat stat_from(const ojson& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>(), j.at("n").get<std::size_t>()};
}

std::string fmt2(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
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

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string swatches(const std::vector<Color>& colors) {
  if (colors.empty()) return "<span class=\"none\">none</span>";
  std::string out;
  for (Color c : colors) {
    const auto hex = color_to_hex(c);
    out += "<span class=\"sw\" style=\"background:" + hex + "\" title=\"" + hex + "\"></span>";
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string_view to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::Ok: return "ok";
    case CaseStatus::ParseFailure: return "parse_failure";
    case CaseStatus::ProviderFailure: return "provider_failure";
  }
  return "ok";
}

CaseStatus parse_case_status(std::string_view name) {
  if (name == "ok") return CaseStatus::Ok;
  if (name == "parse_failure") return CaseStatus::ParseFailure;
  if (name == "provider_failure") return CaseStatus::ProviderFailure;
  throw ValidationError("unknown case status '" + std::string(name) + "'");
}

bool MetricsReport::incomplete() const {
  for (const auto& a : arms) {
    if (a.incomplete()) return true;
  }
  return false;
}

void summarize_completion(ArmReport& arm) {
  arm.by_mask_count.clear();
  arm.by_element.clear();
  arm.total_cases = arm.cases.size();
  arm.parse_failures = arm.provider_failures = arm.requests = 0;

  std::map<int, MaskCountStats> by_k;
  std::map<int, std::pair<std::vector<Color>, std::vector<Color>>> colors_by_k;
  for (auto& c : arm.cases) {
    auto& s = by_k[c.k];
    s.k = c.k;
    ++s.cases;
    arm.requests += static_cast<std::size_t>(c.requests);
    auto& [pred, gt] = colors_by_k[c.k];
    gt.insert(gt.end(), c.ground_truth.begin(), c.ground_truth.end());
    if (c.status == CaseStatus::Ok) {
      c.correct = bins_match(c.predicted, c.ground_truth);
      pred.insert(pred.end(), c.predicted.begin(), c.predicted.end());
    } else {
      c.correct = false;
      ++(c.status == CaseStatus::ParseFailure ? s.parse_failures : s.provider_failures);
    }
    s.correct += c.correct ? 1 : 0;
  }
  for (auto& [k, s] : by_k) {
    s.accuracy = percent(s.correct, s.cases);
    const auto& [pred, gt] = colors_by_k[k];
    s.distribution = pred.empty() ? 0.0 : round2(distribution(pred));
    s.gt_distribution = gt.empty() ? 0.0 : round2(distribution(gt));
    arm.parse_failures += s.parse_failures;
    arm.provider_failures += s.provider_failures;
    arm.by_mask_count.push_back(s);
  }

  std::size_t k1 = 0;
  for (const auto& c : arm.cases) k1 += c.k == 1 ? 1 : 0;
  for (ElementKind kind : kElementOrder) {
    ElementStats e;
    e.kind = std::string(to_string(kind));
    for (const auto& c : arm.cases) {
      if (c.k != 1 || c.element_kind != e.kind) continue;
      ++e.cases;
      e.correct += c.correct ? 1 : 0;
    }
    e.accuracy = percent(e.correct, e.cases);
    e.ratio = percent(e.cases, k1);
    arm.by_element.push_back(e);
  }
}

void summarize_generation(ArmReport& arm, SimilarityStrategy strategy, DistanceSpace space) {
  arm.by_mask_count.clear();
  arm.by_element.clear();
  arm.total_cases = arm.cases.size();
  arm.parse_failures = arm.provider_failures = arm.requests = 0;

  std::vector<double> sim, chamfer, div, gt_div;
  for (auto& c : arm.cases) {
    arm.requests += static_cast<std::size_t>(c.requests);
    const Palette gt = Palette::of(c.ground_truth);
    gt_div.push_back(palette_diversity(gt, space));
    if (c.status != CaseStatus::Ok) {
      ++(c.status == CaseStatus::ParseFailure ? arm.parse_failures : arm.provider_failures);
      c.similarity = c.diversity = 0.0;
      continue;
    }
    const Palette pred = Palette::of(c.predicted);
    const double s = palette_similarity(pred, gt, strategy, space);
    const double d = palette_diversity(pred, space);
    c.similarity = round2(s);
    c.diversity = round2(d);
    sim.push_back(s);
    div.push_back(d);
    chamfer.push_back(palette_similarity(pred, gt, SimilarityStrategy::Chamfer, space));
  }
  arm.similarity = rounded(summarize(sim));
  arm.similarity_chamfer = rounded(summarize(chamfer));
  arm.diversity = rounded(summarize(div));
  arm.gt_diversity = rounded(summarize(gt_div));
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  ojson j;
  j["task"] = r.task;
  j["incomplete"] = r.incomplete();
  j["metadata"] = r.metadata;
  j["arms"] = ojson::array();
  for (const auto& a : r.arms) {
    ojson aj;
    aj["name"] = a.name;
    aj["prompt"] = a.prompt;
    aj["total_cases"] = a.total_cases;
    aj["parse_failures"] = a.parse_failures;
    aj["provider_failures"] = a.provider_failures;
    aj["requests"] = a.requests;
    if (r.task == "completion") {
      aj["by_mask_count"] = ojson::array();
      for (const auto& s : a.by_mask_count) {
        aj["by_mask_count"].push_back({{"k", s.k},
                                       {"cases", s.cases},
                                       {"correct", s.correct},
                                       {"parse_failures", s.parse_failures},
                                       {"provider_failures", s.provider_failures},
                                       {"accuracy", s.accuracy},
                                       {"distribution", s.distribution},
                                       {"gt_distribution", s.gt_distribution}});
      }
      aj["by_element"] = ojson::array();
      for (const auto& e : a.by_element) {
        aj["by_element"].push_back({{"kind", e.kind},
                                    {"cases", e.cases},
                                    {"correct", e.correct},
                                    {"accuracy", e.accuracy},
                                    {"ratio", e.ratio}});
      }
    } else {
      aj["similarity"] = stat_json(a.similarity);
      aj["similarity_chamfer"] = stat_json(a.similarity_chamfer);
      aj["diversity"] = stat_json(a.diversity);
      aj["gt_diversity"] = stat_json(a.gt_diversity);
    }
    aj["cases"] = ojson::array();
    for (const auto& c : a.cases) {
      ojson cj;
      cj["case"] = c.case_id;
      cj["document"] = c.document_id;
      cj["k"] = c.k;
      if (!c.element_kind.empty()) cj["element_kind"] = c.element_kind;
      cj["exemplar"] = c.exemplar_id;
      cj["status"] = to_string(c.status);
      cj["requests"] = c.requests;
      cj["predicted"] = hex_list(c.predicted);
      cj["ground_truth"] = hex_list(c.ground_truth);
      if (r.task == "completion") {
        cj["correct"] = c.correct;
      } else {
        cj["similarity"] = c.similarity;
        cj["diversity"] = c.diversity;
      }
      if (!c.error.empty()) cj["error"] = c.error;
      aj["cases"].push_back(std::move(cj));
    }
    j["arms"].push_back(std::move(aj));
  }
  return j;
}

MetricsReport report_from_json(const nlohmann::ordered_json& j) {
  try {
    MetricsReport r;
    r.task = j.at("task").get<std::string>();
    r.metadata = j.at("metadata");
    for (const auto& aj : j.at("arms")) {
      ArmReport a;
      a.name = aj.at("name").get<std::string>();
      a.prompt = aj.at("prompt");
      a.total_cases = aj.at("total_cases").get<std::size_t>();
      a.parse_failures = aj.at("parse_failures").get<std::size_t>();
      a.provider_failures = aj.at("provider_failures").get<std::size_t>();
      a.requests = aj.at("requests").get<std::size_t>();
      if (aj.contains("by_mask_count")) {
        for (const auto& s : aj["by_mask_count"]) {
          a.by_mask_count.push_back({s.at("k").get<int>(), s.at("cases").get<std::size_t>(),
                                     s.at("correct").get<std::size_t>(),
                                     s.at("parse_failures").get<std::size_t>(),
                                     s.at("provider_failures").get<std::size_t>(),
                                     s.at("accuracy").get<double>(), s.at("distribution").get<double>(),
                                     s.at("gt_distribution").get<double>()});
        }
      }
      if (aj.contains("by_element")) {
        for (const auto& e : aj["by_element"]) {
          a.by_element.push_back({e.at("kind").get<std::string>(), e.at("cases").get<std::size_t>(),
                                  e.at("correct").get<std::size_t>(), e.at("accuracy").get<double>(),
                                  e.at("ratio").get<double>()});
        }
      }
      if (aj.contains("similarity")) {
        a.similarity = stat_from(aj["similarity"]);
        a.similarity_chamfer = stat_from(aj.at("similarity_chamfer"));
        a.diversity = stat_from(aj.at("diversity"));
        a.gt_diversity = stat_from(aj.at("gt_diversity"));
      }
      for (const auto& cj : aj.at("cases")) {
        CaseResult c;
        c.case_id = cj.at("case").get<std::string>();
        c.document_id = cj.at("document").get<std::string>();
        c.k = cj.at("k").get<int>();
        c.element_kind = cj.value("element_kind", "");
        c.exemplar_id = cj.at("exemplar").get<std::string>();
        c.status = parse_case_status(cj.at("status").get<std::string>());
        c.requests = cj.at("requests").get<int>();
        c.predicted = colors_from(cj.at("predicted"));
        c.ground_truth = colors_from(cj.at("ground_truth"));
        c.correct = cj.value("correct", false);
        c.similarity = cj.value("similarity", 0.0);
        c.diversity = cj.value("diversity", 0.0);
        c.error = cj.value("error", "");
        a.cases.push_back(std::move(c));
      }
      r.arms.push_back(std::move(a));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report JSON: ") + e.what());
  }
}

std::string table1_csv(const MetricsReport& r) {
  std::string out =
      "arm,accuracy_1color,accuracy_2color,accuracy_3color,distribution_1color,distribution_2color,"
      "distribution_3color,gt_distribution_1color,gt_distribution_2color,gt_distribution_3color\n";
  for (const auto& a : r.arms) {
    std::array<const MaskCountStats*, 3> s{};
    for (const auto& m : a.by_mask_count) {
      if (m.k >= 1 && m.k <= 3) s[static_cast<std::size_t>(m.k - 1)] = &m;
    }
    out += csv_field(a.name);
    for (const auto* m : s) out += "," + (m ? fmt2(m->accuracy) : std::string());
    for (const auto* m : s) out += "," + (m ? fmt2(m->distribution) : std::string());
    for (const auto* m : s) out += "," + (m ? fmt2(m->gt_distribution) : std::string());
    out += "\n";
  }
  return out;
}

std::string table2_csv(const MetricsReport& r) {
  std::string out = "arm,element,ratio,cases,accuracy\n";
  for (const auto& a : r.arms) {
    for (const auto& e : a.by_element) {
      out += csv_field(a.name) + "," + e.kind + "," + fmt2(e.ratio) + "," + std::to_string(e.cases) + "," +
             fmt2(e.accuracy) + "\n";
    }
  }
  return out;
}

std::string table4_csv(const MetricsReport& r) {
  std::string out =
      "arm,similarity_mean,similarity_std,chamfer_mean,chamfer_std,diversity_mean,diversity_std,"
      "gt_diversity_mean,gt_diversity_std,cases,parse_failures\n";
  for (const auto& a : r.arms) {
    out += csv_field(a.name) + "," + fmt2(a.similarity.mean) + "," + fmt2(a.similarity.std) + "," +
           fmt2(a.similarity_chamfer.mean) + "," + fmt2(a.similarity_chamfer.std) + "," +
           fmt2(a.diversity.mean) + "," + fmt2(a.diversity.std) + "," + fmt2(a.gt_diversity.mean) + "," +
           fmt2(a.gt_diversity.std) + "," + std::to_string(a.total_cases) + "," +
           std::to_string(a.parse_failures) + "\n";
  }
  return out;
}

std::string swatch_html(const MetricsReport& r) {
  std::string out =
      "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>colorgpt " + html_escape(r.task) +
      " report</title>\n<style>\n"
      "body{font-family:sans-serif;margin:1.5em}\n"
      "table{border-collapse:collapse;margin-bottom:2em}\n"
      "td,th{border:1px solid #ccc;padding:4px 8px;text-align:left}\n"
      ".sw{display:inline-block;width:28px;height:28px;margin-right:2px;border:1px solid #888}\n"
      ".none{color:#999}\n"
      "</style>\n</head>\n<body>\n<h1>" +
      html_escape(r.task) + " report</h1>\n";
  for (const auto& a : r.arms) {
    out += "<h2>" + html_escape(a.name) + "</h2>\n<table>\n<tr><th>case</th>";
    if (r.task == "completion") out += "<th>k</th>";
    out += "<th>predicted</th><th>ground truth</th><th>status</th><th>";
    out += r.task == "completion" ? "correct" : "similarity";
    out += "</th></tr>\n";
    for (const auto& c : a.cases) {
      out += "<tr><td>" + html_escape(c.case_id) + "</td>";
      if (r.task == "completion") out += "<td>" + std::to_string(c.k) + "</td>";
      out += "<td>" + swatches(c.predicted) + "</td><td>" + swatches(c.ground_truth) + "</td><td>" +
             std::string(to_string(c.status)) + "</td><td>";
      out += r.task == "completion" ? (c.correct ? "yes" : "no") : fmt2(c.similarity);
      out += "</td></tr>\n";
    }
    out += "</table>\n";
  }
  out += "</body>\n</html>\n";
  return out;
}

std::vector<std::filesystem::path> emit_report(const MetricsReport& r, const std::filesystem::path& dir,
                                               const ReportFormats& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto put = [&](const char* name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back(dir / name);
  };
  if (formats.json) put("report.json", to_json(r).dump(2) + "\n");
  if (formats.csv) {
    if (r.task == "completion") {
      put("table1.csv", table1_csv(r));
      put("table2.csv", table2_csv(r));
    } else {
      put("table4.csv", table4_csv(r));
    }
  }
  if (formats.html) put("report.html", swatch_html(r));
  return written;
}

}  // namespace colorgpt
