#include "viewsnip/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "viewsnip/errors.hpp"

namespace viewsnip {

namespace {

constexpr std::array<ViewpointClass, 3> kTruthOrder = {
    ViewpointClass::effective, ViewpointClass::inconclusive, ViewpointClass::ineffective};

bool has_viewpoint(const AnnotationRecord& r) {
  return r.label != ViewpointLabel::no_viewpoint;
}

bool accurate(const AnnotationRecord& r) {
  return has_viewpoint(r) && regroup(r.label) == r.doc_truth;
}

std::vector<const AnnotationRecord*> for_method(std::span<const AnnotationRecord> records,
                                                std::string_view method) {
  std::vector<const AnnotationRecord*> out;
  for (const AnnotationRecord& r : records) {
    if (r.method == method) out.push_back(&r);
  }
  if (out.empty()) {
    throw DataError("no annotations for method '" + std::string(method) + "'");
  }
  return out;
}

std::optional<double> percent_of(long count, long total) {
  if (total <= 0) return std::nullopt;
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotations file: " + path.string());

  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError("malformed annotation line " + std::to_string(line_no));
    }
    auto field = [&](const char* name) -> std::string {
      if (!j.contains(name) || !j.at(name).is_string()) {
        throw DataError("missing or non-string field '" + std::string(name) +
                        "' at line " + std::to_string(line_no));
      }
      return j.at(name).get<std::string>();
    };
    AnnotationRecord record;
    record.doc_id = field("doc_id");
    record.method = field("method");
    record.annotator_id = field("annotator_id");
    const std::string label_token = field("label");
    auto label = label_from_token(label_token);
    if (!label) {
      throw DataError("unknown label '" + label_token + "' at line " +
                      std::to_string(line_no));
    }
    record.label = *label;
    const std::string truth_token = field("doc_truth");
    auto truth = class_from_token(truth_token);
    if (!truth || *truth == ViewpointClass::no_viewpoint) {
      throw DataError("doc_truth '" + truth_token +
                      "' is not a viewpoint class at line " + std::to_string(line_no));
    }
    record.doc_truth = *truth;
    records.push_back(std::move(record));
  }
  return records;
}

NoViewpointTable no_viewpoint_table(std::span<const AnnotationRecord> records,
                                    std::string_view method) {
  NoViewpointTable table;
  for (const AnnotationRecord* r : for_method(records, method)) {
    const std::size_t row = static_cast<std::size_t>(class_index(r->doc_truth));
    ++table.by_truth[row].total;
    ++table.total.total;
    if (!has_viewpoint(*r)) {
      ++table.by_truth[row].count;
      ++table.total.count;
    }
  }
  for (CountPercent& cell : table.by_truth) {
    cell.percent = percent_of(cell.count, cell.total);
  }
  table.total.percent = percent_of(table.total.count, table.total.total);
  return table;
}

ConfusionTable confusion(std::span<const AnnotationRecord> records,
                         std::string_view method) {
  ConfusionTable table;
  for (const AnnotationRecord* r : for_method(records, method)) {
    ++table.total_annotations;
    if (!has_viewpoint(*r)) continue;
    const std::size_t row = static_cast<std::size_t>(class_index(r->doc_truth));
    const std::size_t col = static_cast<std::size_t>(class_index(regroup(r->label)));
    ++table.counts[row][col];
    ++table.row_totals[row];
    ++table.viewpoint_bearing;
    if (row == col) ++table.accurate;
  }
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      table.row_percent[r][c] = percent_of(table.counts[r][c], table.row_totals[r]);
    }
  }
  table.accuracy_viewpoint = percent_of(table.accurate, table.viewpoint_bearing);
  table.accuracy_all = percent_of(table.accurate, table.total_annotations);
  return table;
}

int likert_value(ViewpointLabel label) {
  switch (label) {
    case ViewpointLabel::ineffective: return 1;
    case ViewpointLabel::potentially_ineffective: return 2;
    case ViewpointLabel::inconclusive: return 3;
    case ViewpointLabel::potentially_effective: return 4;
    case ViewpointLabel::effective: return 5;
    case ViewpointLabel::no_viewpoint: break;
  }
  throw DataError("no_viewpoint has no Likert value");
}

LikertSummary likert_std(std::span<const AnnotationRecord> records,
                         std::string_view method) {
  std::map<std::string, std::vector<int>> by_snippet;
  for (const AnnotationRecord* r : for_method(records, method)) {
    auto& ratings = by_snippet[r->doc_id];
    if (has_viewpoint(*r)) ratings.push_back(likert_value(r->label));
  }

  LikertSummary summary;
  double total = 0.0;
  for (const auto& [doc_id, ratings] : by_snippet) {
    SnippetVariability row;
    row.doc_id = doc_id;
    row.ratings = static_cast<int>(ratings.size());
    if (ratings.size() < 2) {
      row.flagged = true;
      ++summary.flagged;
    } else {
      // Welford's online algorithm; the tests cross-check with two-pass sums.
      double mean = 0.0;
      double m2 = 0.0;
      double n = 0.0;
      for (int value : ratings) {
        n += 1.0;
        const double delta = value - mean;
        mean += delta / n;
        m2 += delta * (value - mean);
      }
      row.stddev = std::sqrt(m2 / n);
    }
    total += row.stddev;
    ++summary.snippet_count;
    summary.per_snippet.push_back(std::move(row));
  }
  if (summary.snippet_count > 0) {
    summary.mean_stddev = total / static_cast<double>(summary.snippet_count);
  }
  return summary;
}

MethodComparison compare_methods(std::span<const AnnotationRecord> records,
                                 std::string_view method_a, std::string_view method_b,
                                 bool yates) {
  const auto a = for_method(records, method_a);
  const auto b = for_method(records, method_b);

  MethodComparison cmp;
  cmp.method_a = std::string(method_a);
  cmp.method_b = std::string(method_b);

  auto attempt = [&](const std::string& name, const std::vector<std::vector<double>>& table)
      -> std::optional<ChiSquareResult> {
    try {
      return chi_square(table, yates);
    } catch (const DataError& e) {
      cmp.notes.push_back(name + ": " + e.what());
      return std::nullopt;
    }
  };

  auto accuracy_table = [](const std::vector<const AnnotationRecord*>& rows_a,
                           const std::vector<const AnnotationRecord*>& rows_b,
                           bool viewpoint_only) {
    std::vector<std::vector<double>> table(2, std::vector<double>(2, 0.0));
    const std::array<const std::vector<const AnnotationRecord*>*, 2> groups = {&rows_a,
                                                                               &rows_b};
    for (std::size_t g = 0; g < 2; ++g) {
      for (const AnnotationRecord* r : *groups[g]) {
        if (viewpoint_only && !has_viewpoint(*r)) continue;
        table[g][accurate(*r) ? 0 : 1] += 1.0;
      }
    }
    return table;
  };

  cmp.accuracy_all = attempt("accuracy_all", accuracy_table(a, b, false));
  cmp.accuracy_viewpoint = attempt("accuracy_viewpoint", accuracy_table(a, b, true));

  for (std::size_t t = 0; t < kTruthOrder.size(); ++t) {
    std::vector<std::vector<double>> table(2, std::vector<double>(3, 0.0));
    const std::array<const std::vector<const AnnotationRecord*>*, 2> groups = {&a, &b};
    for (std::size_t g = 0; g < 2; ++g) {
      for (const AnnotationRecord* r : *groups[g]) {
        if (!has_viewpoint(*r) || r->doc_truth != kTruthOrder[t]) continue;
        table[g][static_cast<std::size_t>(class_index(regroup(r->label)))] += 1.0;
      }
    }
    cmp.by_truth[t] =
        attempt("by_truth[" + std::string(to_token(kTruthOrder[t])) + "]", table);
  }
  return cmp;
}

ReliabilityReport build_report(std::vector<AnnotationRecord> records,
                               std::vector<std::string> methods,
                               const std::vector<std::pair<std::string, std::string>>& chi2_pairs,
                               bool yates) {
  std::stable_sort(records.begin(), records.end(),
                   [](const AnnotationRecord& x, const AnnotationRecord& y) {
                     return std::tie(x.doc_id, x.annotator_id, x.method) <
                            std::tie(y.doc_id, y.annotator_id, y.method);
                   });

  if (methods.empty()) {
    for (const AnnotationRecord& r : records) {
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
        methods.push_back(r.method);
      }
    }
    std::sort(methods.begin(), methods.end());
  }

  ReliabilityReport report;
  for (const std::string& method : methods) {
    MethodReport mr;
    mr.method = method;
    mr.no_viewpoint = no_viewpoint_table(records, method);
    mr.confusion = confusion(records, method);
    mr.likert = likert_std(records, method);
    report.methods.push_back(std::move(mr));
  }
  for (const auto& [a, b] : chi2_pairs) {
    report.comparisons.push_back(compare_methods(records, a, b, yates));
  }
  return report;
}

namespace {

nlohmann::ordered_json count_percent_json(const CountPercent& cell) {
  nlohmann::ordered_json j;
  j["count"] = cell.count;
  j["total"] = cell.total;
  if (cell.percent) {
    j["percent"] = *cell.percent;
  } else {
    j["percent"] = nullptr;
  }
  return j;
}

nlohmann::ordered_json chi_json(const std::optional<ChiSquareResult>& result) {
  if (!result) return nullptr;
  nlohmann::ordered_json j;
  j["statistic"] = result->statistic;
  j["degrees_of_freedom"] = result->degrees_of_freedom;
  j["p_value"] = result->p_value;
  return j;
}

}  // namespace

nlohmann::ordered_json report_json(const ReliabilityReport& report) {
  nlohmann::ordered_json root;
  root["methods"] = nlohmann::ordered_json::array();
  for (const MethodReport& mr : report.methods) {
    nlohmann::ordered_json m;
    m["method"] = mr.method;

    nlohmann::ordered_json nv;
    for (std::size_t t = 0; t < kTruthOrder.size(); ++t) {
      nv[std::string(to_token(kTruthOrder[t]))] = count_percent_json(mr.no_viewpoint.by_truth[t]);
    }
    nv["total"] = count_percent_json(mr.no_viewpoint.total);
    m["no_viewpoint"] = std::move(nv);

    nlohmann::ordered_json cf;
    cf["classes"] = {"effective", "inconclusive", "ineffective"};
    cf["counts"] = mr.confusion.counts;
    nlohmann::ordered_json percents = nlohmann::ordered_json::array();
    for (const auto& row : mr.confusion.row_percent) {
      nlohmann::ordered_json out_row = nlohmann::ordered_json::array();
      for (const auto& cell : row) {
        if (cell) {
          out_row.push_back(*cell);
        } else {
          out_row.push_back(nullptr);
        }
      }
      percents.push_back(std::move(out_row));
    }
    cf["row_percent"] = std::move(percents);
    cf["row_totals"] = mr.confusion.row_totals;
    cf["total_annotations"] = mr.confusion.total_annotations;
    cf["viewpoint_bearing"] = mr.confusion.viewpoint_bearing;
    cf["accurate"] = mr.confusion.accurate;
    cf["accuracy_viewpoint"] = mr.confusion.accuracy_viewpoint
                                   ? nlohmann::ordered_json(*mr.confusion.accuracy_viewpoint)
                                   : nlohmann::ordered_json(nullptr);
    cf["accuracy_all"] = mr.confusion.accuracy_all
                             ? nlohmann::ordered_json(*mr.confusion.accuracy_all)
                             : nlohmann::ordered_json(nullptr);
    m["confusion"] = std::move(cf);

    nlohmann::ordered_json lk;
    lk["mean_stddev"] = mr.likert.mean_stddev;
    lk["snippet_count"] = mr.likert.snippet_count;
    lk["flagged"] = mr.likert.flagged;
    m["likert"] = std::move(lk);

    root["methods"].push_back(std::move(m));
  }

  root["comparisons"] = nlohmann::ordered_json::array();
  for (const MethodComparison& cmp : report.comparisons) {
    nlohmann::ordered_json c;
    c["method_a"] = cmp.method_a;
    c["method_b"] = cmp.method_b;
    c["accuracy_all"] = chi_json(cmp.accuracy_all);
    c["accuracy_viewpoint"] = chi_json(cmp.accuracy_viewpoint);
    nlohmann::ordered_json by_truth;
    for (std::size_t t = 0; t < kTruthOrder.size(); ++t) {
      by_truth[std::string(to_token(kTruthOrder[t]))] = chi_json(cmp.by_truth[t]);
    }
    c["by_truth"] = std::move(by_truth);
    c["notes"] = cmp.notes;
    root["comparisons"].push_back(std::move(c));
  }
  return root;
}

namespace {

std::string fmt_percent(const std::optional<double>& percent, int decimals) {
  if (!percent) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << *percent << '%';
  return out.str();
}

std::string fmt_cell(long count, const std::optional<double>& percent) {
  std::ostringstream out;
  out << count << " (" << fmt_percent(percent, 1) << ')';
  return out.str();
}

}  // namespace

std::string report_text(const ReliabilityReport& report) {
  std::ostringstream out;
  for (const MethodReport& mr : report.methods) {
    out << "method: " << mr.method << '\n';
    out << "  annotations: " << mr.confusion.total_annotations << " total, "
        << mr.confusion.viewpoint_bearing << " viewpoint-bearing\n";

    out << "  no-viewpoint captions by document viewpoint\n";
    for (std::size_t t = 0; t < kTruthOrder.size(); ++t) {
      const CountPercent& cell = mr.no_viewpoint.by_truth[t];
      out << "    " << std::left << std::setw(14) << to_token(kTruthOrder[t]) << std::right
          << std::setw(6) << cell.count << "  " << fmt_percent(cell.percent, 2) << '\n';
    }
    out << "    " << std::left << std::setw(14) << "total" << std::right << std::setw(6)
        << mr.no_viewpoint.total.count << "  " << fmt_percent(mr.no_viewpoint.total.percent, 2)
        << '\n';

    out << "  annotated viewpoint (rows: document viewpoint)\n";
    out << "    " << std::left << std::setw(14) << "" << std::setw(16) << "effective"
        << std::setw(16) << "inconclusive" << std::setw(16) << "ineffective" << '\n';
    for (std::size_t r = 0; r < 3; ++r) {
      out << "    " << std::left << std::setw(14) << to_token(kTruthOrder[r]);
      for (std::size_t c = 0; c < 3; ++c) {
        out << std::setw(16) << fmt_cell(mr.confusion.counts[r][c], mr.confusion.row_percent[r][c]);
      }
      out << '\n';
    }
    out << "  accuracy: " << fmt_percent(mr.confusion.accuracy_viewpoint, 1)
        << " of viewpoint-bearing, " << fmt_percent(mr.confusion.accuracy_all, 1)
        << " of all annotations\n";

    std::ostringstream sigma;
    sigma << std::fixed << std::setprecision(3) << mr.likert.mean_stddev;
    out << "  likert: mean per-snippet stddev " << sigma.str() << " over "
        << mr.likert.snippet_count << " snippets";
    if (mr.likert.flagged > 0) {
      out << " (" << mr.likert.flagged << " with <2 ratings)";
    }
    out << "\n\n";
  }

  for (const MethodComparison& cmp : report.comparisons) {
    out << "chi-square: " << cmp.method_a << " vs " << cmp.method_b << '\n';
    auto line = [&](const std::string& name, const std::optional<ChiSquareResult>& result) {
      out << "  " << std::left << std::setw(26) << name << std::right;
      if (result) {
        std::ostringstream stat, p;
        stat << std::fixed << std::setprecision(4) << result->statistic;
        p << std::scientific << std::setprecision(3) << result->p_value;
        out << "statistic " << stat.str() << ", df " << result->degrees_of_freedom
            << ", p " << p.str() << '\n';
      } else {
        out << "skipped\n";
      }
    };
    line("accuracy (all)", cmp.accuracy_all);
    line("accuracy (viewpoint)", cmp.accuracy_viewpoint);
    for (std::size_t t = 0; t < kTruthOrder.size(); ++t) {
      line("truth " + std::string(to_token(kTruthOrder[t])), cmp.by_truth[t]);
    }
    for (const std::string& note : cmp.notes) {
      out << "  note: " << note << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace viewsnip
