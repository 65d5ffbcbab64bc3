#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "support/run_cli.hpp"
#include "viewsnip/errors.hpp"
#include "viewsnip/serpgen.hpp"

using namespace viewsnip;

namespace {

std::vector<Caption> sample_captions() {
  return {
      {"Roselle tea and blood pressure", "Pressure fell in the tea arm.",
       "https://example.test/one"},
      {"A second trial", "No change was observed.", "https://example.test/two"},
      {"Review of herbal options", "Evidence remains limited.", std::nullopt},
      {"Dietary interventions", "Participants preferred the infusion.",
       "https://example.test/four"},
      {"Long-term follow-up", "Effects faded after a year.", std::nullopt},
      {"Meta-analysis", "Most trials were small.", "https://example.test/six"},
  };
}

std::vector<std::string> titles_of(const std::vector<Caption>& captions) {
  std::vector<std::string> out;
  for (const Caption& c : captions) out.push_back(c.title);
  return out;
}

}  // namespace

TEST_SUITE("serpgen") {

TEST_CASE("query templates fill in both terms") {
  const InterventionCondition ic{"roselle", "hypertension"};
  CHECK(positive_query_text(ic) == "Is roselle effective in treating hypertension?");
  CHECK(positive_query_text(ic, "Does {intervention} help with {condition}?") ==
        "Does roselle help with hypertension?");
  CHECK(positive_query_text(ic, "{condition}: {intervention}") ==
        "hypertension: roselle");
  const InterventionCondition cased{"Ginkgo Biloba", "tinnitus"};
  CHECK(positive_query_text(cased) == "Is Ginkgo Biloba effective in treating tinnitus?");
}

TEST_CASE("caption order depends only on seed and query id") {
  const auto captions = sample_captions();
  const auto a = order_captions(captions, "roselle_hypertension", 42);
  const auto b = order_captions(captions, "roselle_hypertension", 42);
  CHECK(titles_of(a) == titles_of(b));

  // Same multiset of captions, and a real permutation for this seed.
  auto sorted_in = titles_of(captions);
  auto sorted_out = titles_of(a);
  std::sort(sorted_in.begin(), sorted_in.end());
  std::sort(sorted_out.begin(), sorted_out.end());
  CHECK(sorted_in == sorted_out);
  CHECK(titles_of(a) != titles_of(captions));

  // Different key, different order; order never depends on anything else.
  const auto other_seed = order_captions(captions, "roselle_hypertension", 43);
  const auto other_query = order_captions(captions, "aromatherapy_dementia", 42);
  CHECK(titles_of(other_seed) != titles_of(a));
  CHECK(titles_of(other_query) != titles_of(a));

  CHECK(order_captions({}, "q", 1).empty());
  CHECK(order_captions({captions[0]}, "q", 1).size() == 1);
}

TEST_CASE("render escapes every text field") {
  SerpPage page;
  page.query_text = "Is <roselle> effective & safe?";
  page.captions = {{"Bold <b>title</b>", "Snippet with \"quotes\" & <i>tags</i>",
                    "https://example.test/?a=1&b=2"}};
  const std::string html = render(page);
  CHECK(html.find("<b>") == std::string::npos);
  CHECK(html.find("&lt;b&gt;title&lt;/b&gt;") != std::string::npos);
  CHECK(html.find("Is &lt;roselle&gt; effective &amp; safe?") != std::string::npos);
  CHECK(html.find("&quot;quotes&quot;") != std::string::npos);
  CHECK(html.find("?a=1&amp;b=2") != std::string::npos);
}

TEST_CASE("rendered pages have no navigable links") {
  SerpPage page;
  page.query_text = "q";
  page.captions = sample_captions();
  const std::string html = render(page);
  CHECK(html.find("href") == std::string::npos);
  CHECK(html.find("<a class=\"title\"") != std::string::npos);
  // The url line is display-only text and missing urls leave no empty element.
  CHECK(html.find("https://example.test/one") != std::string::npos);
  CHECK(std::count(html.begin(), html.end(), '\n') > 10);
}

TEST_CASE("rendering is byte-stable and marks the method") {
  SerpPage page;
  page.query_text = "Is roselle effective in treating hypertension?";
  page.captions = sample_captions();
  page.method_tag = "framework";
  const std::string once = render(page);
  const std::string twice = render(page);
  CHECK(once == twice);
  CHECK(once.find("framework") != std::string::npos);
  CHECK(once.find("<!DOCTYPE html>") == 0);
  CHECK(once.find("<title>Is roselle effective in treating hypertension?</title>") !=
        std::string::npos);

  // The stylesheet always carries a .method-tag rule; only the element should
  // disappear when no tag is set.
  SerpPage untagged = page;
  untagged.method_tag.clear();
  CHECK(render(untagged).find("<div class=\"method-tag\">") == std::string::npos);
}

TEST_CASE("an empty page is an error") {
  SerpPage page;
  page.query_text = "q";
  CHECK_THROWS_WITH_AS(render(page), "empty SERP", DataError);
}

TEST_CASE("rendered output matches the checked-in golden page") {
  SerpPage page;
  page.query_text = "Is roselle effective in treating hypertension?";
  page.captions = order_captions(sample_captions(), "roselle_hypertension", 42);
  page.seed = 42;
  page.method_tag = "framework";
  const std::string html = render(page);

  const auto golden_path = viewsnip::testing::test_data_dir() / "serp_golden.html";
  std::ifstream in(golden_path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file: " << golden_path.string());
  std::string golden((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
  if (html != golden) {
    const auto actual = golden_path.parent_path() / "serp_golden.actual.html";
    std::ofstream out(actual, std::ios::binary);
    out << html;
    FAIL("golden mismatch; actual output written to " << actual.string());
  }
  CHECK(html == golden);
}

}  // TEST_SUITE
