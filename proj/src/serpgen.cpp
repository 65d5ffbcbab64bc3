#include "viewsnip/serpgen.hpp"

#include <utility>

#include "viewsnip/errors.hpp"
#include "viewsnip/rng.hpp"

namespace viewsnip {

namespace {

void replace_all(std::string& text, std::string_view placeholder, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

std::string escape_html(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string positive_query_text(const InterventionCondition& ic,
                                std::string_view query_template) {
  std::string out(query_template);
  replace_all(out, "{intervention}", ic.intervention);
  replace_all(out, "{condition}", ic.condition);
  return out;
}

std::vector<Caption> order_captions(std::vector<Caption> captions, std::string_view query_id,
                                    std::uint64_t seed) {
  // Keyed by (seed, query_id) only, so every method shows the same order for a
  // given query. The generator is fixed here rather than taken from the
  // platform, keeping permutations stable across standard libraries.
  SplitMix64 rng(seed ^ fnv1a64(query_id));
  for (std::size_t i = captions.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(captions[i - 1], captions[j]);
  }
  return captions;
}

std::string render(const SerpPage& page) {
  if (page.captions.empty()) throw DataError("empty SERP");

  std::string out;
  out +=
      "<!DOCTYPE html>\n"
      "<html lang=\"en\">\n"
      "<head>\n"
      "<meta charset=\"utf-8\">\n"
      "<title>" + escape_html(page.query_text) + "</title>\n"
      "<style>\n"
      "body { font-family: Arial, sans-serif; margin: 2em auto; max-width: 44em; }\n"
      ".query-box { border: 1px solid #999; border-radius: 1.2em; padding: 0.6em 1.2em;"
      " margin-bottom: 2em; }\n"
      ".result { margin-bottom: 1.6em; }\n"
      ".title { color: #1a0dab; font-size: 1.1em; text-decoration: underline;"
      " cursor: default; }\n"
      ".url { color: #006621; font-size: 0.9em; }\n"
      ".snippet { color: #333; margin: 0.2em 0 0 0; }\n"
      ".method-tag { color: #999; font-size: 0.8em; margin-top: 2.5em; }\n"
      "</style>\n"
      "</head>\n"
      "<body>\n"
      "<div class=\"query-box\">" + escape_html(page.query_text) + "</div>\n";
  for (const Caption& caption : page.captions) {
    // Anchors deliberately carry no href: titles look like results but lead
    // nowhere.
    out += "<div class=\"result\">\n";
    out += "<a class=\"title\">" + escape_html(caption.title) + "</a>\n";
    if (caption.url) {
      out += "<div class=\"url\">" + escape_html(*caption.url) + "</div>\n";
    }
    out += "<p class=\"snippet\">" + escape_html(caption.snippet) + "</p>\n";
    out += "</div>\n";
  }
  if (!page.method_tag.empty()) {
    out += "<div class=\"method-tag\">" + escape_html(page.method_tag) + "</div>\n";
  }
  out += "</body>\n</html>\n";
  return out;
}

}  // namespace viewsnip
