#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "viewsnip/chi_square.hpp"
#include "viewsnip/corpus.hpp"

namespace viewsnip {

// One participant annotation of one snippet. doc_truth is the document's
// ground-truth class and is never no_viewpoint.
struct AnnotationRecord {
  std::string doc_id;
  std::string method;        // extraction-method tag
  std::string annotator_id;
  ViewpointLabel label = ViewpointLabel::no_viewpoint;
  ViewpointClass doc_truth = ViewpointClass::effective;
};

// JSONL: {doc_id, method, annotator_id, label, doc_truth}.
std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);

struct CountPercent {
  long count = 0;
  long total = 0;
  std::optional<double> percent;  // 100 * count / total; empty when total is 0
};

// How often captions were annotated as presenting no viewpoint, grouped by
// the document's true class. Percentages are against the per-truth
// annotation totals.
struct NoViewpointTable {
  std::array<CountPercent, 3> by_truth;  // indexed like kClassifierClasses
  CountPercent total;
};

NoViewpointTable no_viewpoint_table(std::span<const AnnotationRecord> records,
                                    std::string_view method);

// 3x3 confusion of annotations against document truth, with no_viewpoint
// annotations excluded and labels regrouped. Rows are doc_truth, columns the
// annotated class. Row percentages are against the row's viewpoint-bearing
// total and are left undefined (not 0) for empty rows.
struct ConfusionTable {
  std::array<std::array<long, 3>, 3> counts{};
  std::array<long, 3> row_totals{};
  std::array<std::array<std::optional<double>, 3>, 3> row_percent;
  long total_annotations = 0;   // including no_viewpoint ones
  long viewpoint_bearing = 0;
  long accurate = 0;            // trace of the matrix
  std::optional<double> accuracy_viewpoint;  // accurate / viewpoint_bearing, %
  std::optional<double> accuracy_all;        // accurate / total_annotations, %
};

ConfusionTable confusion(std::span<const AnnotationRecord> records,
                         std::string_view method);

// Viewpoint-bearing labels on the 5-point scale: ineffective=1,
// potentially_ineffective=2, inconclusive=3, potentially_effective=4,
// effective=5. Throws DataError for no_viewpoint.
int likert_value(ViewpointLabel label);

struct SnippetVariability {
  std::string doc_id;
  int ratings = 0;      // viewpoint-bearing annotations for this snippet
  double stddev = 0.0;  // population standard deviation
  bool flagged = false; // fewer than 2 ratings; stddev reported as 0
};

// Per-snippet population standard deviation of Likert values, no_viewpoint
// annotations excluded, and their mean across the method's snippets.
struct LikertSummary {
  double mean_stddev = 0.0;
  long snippet_count = 0;
  long flagged = 0;
  std::vector<SnippetVariability> per_snippet;  // sorted by doc_id
};

LikertSummary likert_std(std::span<const AnnotationRecord> records,
                         std::string_view method);

// Chi-square comparisons between two methods, mirroring the tables the
// harness can build from annotation data: accuracy proportions over all
// annotations, accuracy proportions over viewpoint-bearing annotations, and
// the per-truth annotated-class distributions. Degenerate tables yield an
// empty result plus a note.
struct MethodComparison {
  std::string method_a;
  std::string method_b;
  std::optional<ChiSquareResult> accuracy_all;
  std::optional<ChiSquareResult> accuracy_viewpoint;
  std::array<std::optional<ChiSquareResult>, 3> by_truth;
  std::vector<std::string> notes;
};

MethodComparison compare_methods(std::span<const AnnotationRecord> records,
                                 std::string_view method_a,
                                 std::string_view method_b,
                                 bool yates = false);

struct MethodReport {
  std::string method;
  NoViewpointTable no_viewpoint;
  ConfusionTable confusion;
  LikertSummary likert;
};

struct ReliabilityReport {
  std::vector<MethodReport> methods;
  std::vector<MethodComparison> comparisons;
};

// Aggregates every requested method and chi-square pair. Methods default to
// the sorted set found in the records. Record order does not affect the
// output: records are sorted by (doc_id, annotator_id, method) first.
ReliabilityReport build_report(
    std::vector<AnnotationRecord> records,
    std::vector<std::string> methods = {},
    const std::vector<std::pair<std::string, std::string>>& chi2_pairs = {},
    bool yates = false);

nlohmann::ordered_json report_json(const ReliabilityReport& report);
std::string report_text(const ReliabilityReport& report);

}  // namespace viewsnip
