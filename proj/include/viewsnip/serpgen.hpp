#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "viewsnip/corpus.hpp"
#include "viewsnip/extract.hpp"

namespace viewsnip {

struct SerpPage {
  std::string query_text;  // positively phrased display form
  std::vector<Caption> captions;
  std::uint64_t seed = 0;
  std::string method_tag;
};

inline constexpr std::string_view kDefaultQueryTemplate =
    "Is {intervention} effective in treating {condition}?";

// Fills {intervention} and {condition} placeholders, keeping the terms'
// original casing.
std::string positive_query_text(const InterventionCondition& ic,
                                std::string_view query_template =
                                    kDefaultQueryTemplate);

// Deterministic permutation keyed by (seed, query_id) only, so SERPs for the
// same query share one order regardless of the extraction method. Uses the
// embedded SplitMix64 generator; portable across platforms.
std::vector<Caption> order_captions(std::vector<Caption> captions,
                                    std::string_view query_id,
                                    std::uint64_t seed);

// Self-contained HTML: a query box and the caption list, all styling inlined,
// every text field escaped, and no anchor with a navigable href. Byte-stable
// for identical input. Throws DataError("empty SERP") on an empty caption
// list.
std::string render(const SerpPage& page);

}  // namespace viewsnip
