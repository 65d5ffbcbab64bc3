#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "viewsnip/corpus.hpp"
#include "viewsnip/errors.hpp"
#include "viewsnip/evaluate.hpp"
#include "viewsnip/extract.hpp"
#include "viewsnip/preprocess.hpp"
#include "viewsnip/remote.hpp"
#include "viewsnip/serpgen.hpp"
#include "viewsnip/viewpoint.hpp"

namespace {

using namespace viewsnip;

// Post-parse problems with flag values; distinct from data errors so the exit
// code stays 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestArgs {
  std::string corpus;
  std::string out;
};

struct TrainArgs {
  std::string corpus;
  std::string out;
  TrainOptions options;
};

struct ExtractArgs {
  std::string corpus;
  std::string model;
  std::string endpoint;
  std::string out;
  ExtractOptions options;
  int jobs = 0;
};

struct EvaluateArgs {
  std::string annotations;
  std::vector<std::string> methods;
  std::vector<std::string> chi2;
  bool yates = false;
  std::string out = ".";
};

struct SerpArgs {
  std::string corpus;
  std::string snippets;
  std::string query_id;
  std::uint64_t seed = 0;
  std::string out;
  std::string method_tag;
  std::string query_template{kDefaultQueryTemplate};
};

std::string ic_slug(const InterventionCondition& ic) {
  std::string slug;
  for (const std::string& token : tokenize(ic.intervention)) {
    if (!slug.empty()) slug.push_back('_');
    slug += token;
  }
  for (const std::string& token : tokenize(ic.condition)) {
    if (!slug.empty()) slug.push_back('_');
    slug += token;
  }
  return slug;
}

int run_ingest(const IngestArgs& args, bool verbose) {
  std::vector<Document> docs = ingest_corpus(args.corpus);
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw DataError("cannot open output file: " + args.out);
    write_corpus(docs, out);
  }
  if (verbose) {
    for (const Document& doc : docs) {
      std::cerr << doc.id << ": " << doc.paragraphs.size() << " paragraphs\n";
    }
  }
  std::cerr << "ok: " << docs.size() << " documents\n";
  return 0;
}

int run_train(const TrainArgs& args, bool verbose) {
  std::vector<TrainingExample> examples;
  for (const Document& doc : ingest_corpus(args.corpus)) {
    if (!doc.label) {
      throw DataError("document '" + doc.id + "' has no label; training requires labels");
    }
    if (*doc.label == ViewpointLabel::no_viewpoint) {
      throw DataError("document '" + doc.id +
                      "' is labeled no_viewpoint; training labels must regroup to "
                      "effective, inconclusive, or ineffective");
    }
    std::string text;
    for (const std::string& p : doc.paragraphs) {
      if (!text.empty()) text += "\n\n";
      text += p;
    }
    examples.push_back(TrainingExample{std::move(text), regroup(*doc.label)});
  }
  BaselineModel model = BaselineModel::train(examples, args.options);
  model.save(args.out);
  if (verbose) {
    std::cerr << "model id: " << model.id() << '\n';
  }
  std::cerr << "trained on " << examples.size() << " documents, vocabulary "
            << model.vocabulary_size() << ", saved to " << args.out << '\n';
  return 0;
}

int run_extract(ExtractArgs args, bool verbose) {
  if (!args.model.empty() && !args.endpoint.empty()) {
    throw UsageError("pass exactly one of --model and --endpoint");
  }
  if (args.model.empty() && args.endpoint.empty()) {
    if (const char* env = std::getenv("VIEWSNIP_ENDPOINT"); env != nullptr && *env != '\0') {
      args.endpoint = env;
    } else {
      throw UsageError("one of --model or --endpoint (or VIEWSNIP_ENDPOINT) is required");
    }
  }

  std::vector<Document> docs = ingest_corpus(args.corpus);

  std::unique_ptr<ViewpointClassifier> classifier;
  if (!args.model.empty()) {
    classifier = std::make_unique<BaselineModel>(BaselineModel::load(args.model));
  } else {
    classifier = std::make_unique<RemoteClassifier>(args.endpoint);
  }
  if (verbose) {
    std::cerr << "classifier: " << classifier->id() << ", " << docs.size()
              << " documents\n";
  }

  // Open outputs before the long classification pass.
  std::ofstream out(args.out);
  if (!out) throw DataError("cannot open output file: " + args.out);

  BatchOutcome outcome = extract_batch(*classifier, docs, args.options, args.jobs);
  std::vector<SnippetResult> kept;
  for (auto& result : outcome.results) {
    if (result) kept.push_back(std::move(*result));
  }
  write_snippets(kept, out);
  std::cerr << "extracted " << kept.size() << "/" << docs.size() << " snippets to "
            << args.out << '\n';

  if (!outcome.errors.empty()) {
    const std::string sidecar = args.out + ".errors";
    std::ofstream err(sidecar);
    if (!err) throw DataError("cannot open error sidecar: " + sidecar);
    for (const std::string& message : outcome.errors) {
      err << message << '\n';
    }
    std::cerr << outcome.errors.size() << " documents failed; see " << sidecar << '\n';
    return outcome.remote_failure ? 3 : 2;
  }
  return 0;
}

int run_evaluate(const EvaluateArgs& args, bool verbose) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const std::string& pair_text : args.chi2) {
    const auto comma = pair_text.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= pair_text.size() ||
        pair_text.find(',', comma + 1) != std::string::npos) {
      throw UsageError("--chi2 expects 'methodA,methodB', got '" + pair_text + "'");
    }
    pairs.emplace_back(pair_text.substr(0, comma), pair_text.substr(comma + 1));
  }

  std::vector<AnnotationRecord> records = read_annotations(args.annotations);
  if (records.empty()) throw DataError("no annotation records in " + args.annotations);
  if (verbose) {
    std::cerr << records.size() << " annotation records\n";
  }
  ReliabilityReport report = build_report(std::move(records), args.methods, pairs, args.yates);

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  const auto json_path = dir / "report.json";
  const auto text_path = dir / "report.txt";
  {
    std::ofstream json_out(json_path);
    if (!json_out) throw DataError("cannot open output file: " + json_path.string());
    json_out << report_json(report).dump(2) << '\n';
  }
  {
    std::ofstream text_out(text_path);
    if (!text_out) throw DataError("cannot open output file: " + text_path.string());
    text_out << report_text(report);
  }
  std::cerr << "wrote " << json_path.string() << " and " << text_path.string() << '\n';
  return 0;
}

int run_serp(const SerpArgs& args, bool verbose) {
  std::map<std::string, const Document*> by_id;
  std::vector<Document> docs = ingest_corpus(args.corpus);
  for (const Document& doc : docs) by_id[doc.id] = &doc;

  struct Group {
    const Document* first = nullptr;
    std::vector<Caption> captions;
  };
  std::map<std::string, Group> groups;
  for (const SnippetRow& row : read_snippets(args.snippets)) {
    auto it = by_id.find(row.doc_id);
    if (it == by_id.end()) {
      throw DataError("snippet references unknown document '" + row.doc_id + "'");
    }
    const Document& doc = *it->second;
    Group& group = groups[ic_slug(doc.ic)];
    if (group.first == nullptr) group.first = &doc;
    group.captions.push_back(Caption{doc.title, row.snippet, doc.url});
  }
  if (!args.query_id.empty()) {
    auto it = groups.find(args.query_id);
    if (it == groups.end()) {
      throw DataError("no snippets for query-id '" + args.query_id + "'");
    }
    std::map<std::string, Group> only;
    only.insert(*it);
    groups = std::move(only);
  }
  if (groups.empty()) throw DataError("empty SERP");

  std::filesystem::create_directories(args.out);
  for (const auto& [slug, group] : groups) {
    SerpPage page;
    page.query_text = positive_query_text(group.first->ic, args.query_template);
    page.captions = order_captions(group.captions, slug, args.seed);
    page.seed = args.seed;
    page.method_tag = args.method_tag;
    const auto path = std::filesystem::path(args.out) / (slug + ".html");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file: " + path.string());
    out << render(page);
    if (verbose) {
      std::cerr << slug << ": " << group.captions.size() << " captions\n";
    }
  }
  std::cerr << "wrote " << groups.size() << " SERP page" << (groups.size() == 1 ? "" : "s")
            << " to " << args.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viewpoint-aware snippet extraction and SERP tooling"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI/TOML file (flags win)");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Extra progress detail on the diagnostic stream");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and optionally re-emit it");
  ingest->add_option("--corpus", ingest_args.corpus, "Corpus JSONL file")->required();
  ingest->add_option("--out", ingest_args.out, "Write the normalized corpus JSONL here");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the bundled baseline classifier");
  train->add_option("--corpus", train_args.corpus, "Labeled corpus JSONL file")->required();
  train->add_option("--out", train_args.out, "Model JSON output path")->required();
  train->add_option("--seed", train_args.options.seed, "Training seed")
      ->capture_default_str();
  train->add_option("--epochs", train_args.options.epochs, "Gradient descent epochs")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train->add_option("--learning-rate", train_args.options.learning_rate, "Step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--l2", train_args.options.l2, "L2 penalty")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "Extract one snippet per document");
  extract->add_option("--corpus", extract_args.corpus, "Corpus JSONL file")->required();
  extract->add_option("--model", extract_args.model, "Baseline model JSON file");
  extract->add_option("--endpoint", extract_args.endpoint,
                      "Remote classifier endpoint, e.g. http://localhost:8800/classify"
                      " (VIEWSNIP_ENDPOINT is used when neither flag is given)");
  extract->add_option("--out", extract_args.out, "Snippet JSONL output path")->required();
  extract
      ->add_option("--bm25-k1", extract_args.options.preprocess.bm25.k1,
                   "BM25 k1 (term-frequency saturation)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  extract
      ->add_option("--bm25-b", extract_args.options.preprocess.bm25.b,
                   "BM25 b (length normalization)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  extract
      ->add_option("--window-words", extract_args.options.preprocess.window_words,
                   "Word budget per sentence-aligned window")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract->add_flag_callback(
      "--no-fallback",
      [&extract_args] { extract_args.options.preprocess.allow_fallback = false; },
      "Fail a document when every window is filtered out instead of falling back");
  extract
      ->add_option("--crop-limit", extract_args.options.crop_limit,
                   "Snippet character budget, ellipsis included")
      ->check(CLI::Range(4, 100000))
      ->capture_default_str();
  extract
      ->add_option("--jobs", extract_args.jobs,
                   "Worker threads for batch extraction (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "Reliability report over annotations");
  evaluate->add_option("--annotations", evaluate_args.annotations, "Annotation JSONL file")
      ->required();
  evaluate
      ->add_option("--methods", evaluate_args.methods,
                   "Comma-separated methods to report (default: all present)")
      ->delimiter(',');
  evaluate->add_option("--chi2", evaluate_args.chi2,
                       "Method pair 'a,b' to compare; repeatable");
  evaluate->add_flag("--yates", evaluate_args.yates,
                     "Apply the Yates continuity correction");
  evaluate->add_option("--out", evaluate_args.out, "Directory for report.json/report.txt")
      ->capture_default_str();

  SerpArgs serp_args;
  auto* serp = app.add_subcommand("serp", "Render SERP HTML pages from snippets");
  serp->add_option("--corpus", serp_args.corpus, "Corpus JSONL file (titles and queries)")
      ->required();
  serp->add_option("--snippets", serp_args.snippets, "Snippet JSONL file")->required();
  serp->add_option("--query-id", serp_args.query_id,
                   "Only this query (intervention_condition slug)");
  serp->add_option("--seed", serp_args.seed, "Caption shuffle seed")->capture_default_str();
  serp->add_option("--out", serp_args.out, "Output directory for HTML pages")->required();
  serp->add_option("--method", serp_args.method_tag, "Method tag shown in the page footer");
  serp->add_option("--query-template", serp_args.query_template,
                   "Display query template with {intervention} and {condition}")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (ingest->parsed()) return run_ingest(ingest_args, verbose);
    if (train->parsed()) return run_train(train_args, verbose);
    if (extract->parsed()) return run_extract(extract_args, verbose);
    if (evaluate->parsed()) return run_evaluate(evaluate_args, verbose);
    if (serp->parsed()) return run_serp(serp_args, verbose);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const RemoteError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
