#include "infotriage/cli.hpp"

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "infotriage/config.hpp"
#include "infotriage/corpus.hpp"
#include "infotriage/datasets.hpp"
#include "infotriage/evaluate.hpp"
#include "infotriage/query_json.hpp"
#include "infotriage/service.hpp"
#include "infotriage/tokenizer.hpp"

namespace infotriage {
namespace {

enum class OutputFormat { Text, Csv, Json };

struct UserError : Error {
  using Error::Error;
};

bool use_color() { return std::getenv("NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::optional<StanceLabel> stance_arg(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto label = parse_stance(s);
  if (!label) throw UserError("unknown stance '" + s + "'");
  return label;
}

std::shared_ptr<const ClassifierBackend> pick_backend(const std::string& config_path, const std::string& name,
                                                      bool needed) {
  const ServiceConfig config = load_config(config_path.empty() ? std::nullopt : std::optional(std::filesystem::path(config_path)));
  const BackendRegistry registry = make_backends(config);
  if (!name.empty()) {
    auto it = registry.find(name);
    if (it == registry.end()) throw UserError("unknown backend '" + name + "'");
    return it->second;
  }
  if (!needed) return nullptr;
  if (registry.size() != 1) throw UserError("several backends are configured; pick one with --backend");
  return registry.begin()->second;
}

Corpus load_corpus(const std::string& path, const std::string& format) {
  const CorpusFormat f = format.empty() ? format_from_path(path) : parse_corpus_format(format);
  return ingest(path, f);
}

void print_report(const Report& report, OutputFormat fmt, std::ostream& out) {
  switch (fmt) {
    case OutputFormat::Csv:
      out << format_report_csv(report);
      break;
    case OutputFormat::Json:
      out << report_to_json(report).dump(2) << '\n';
      break;
    case OutputFormat::Text: {
      std::string text = format_report_text(report);
      if (use_color()) {
        std::string colored;
        std::istringstream lines(text);
        for (std::string line; std::getline(lines, line);) {
          colored += line.find("  failed: ") != std::string::npos ? "\x1b[31m" + line + "\x1b[0m\n" : line + '\n';
        }
        text = colored;
      }
      out << text;
      break;
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corpus triage: keyword, sentiment, aspect and stance search with evaluation", "infotriage"};
  app.require_subcommand(1);
  app.fallthrough();

  OutputFormat output = OutputFormat::Text;
  const std::map<std::string, OutputFormat> output_names{
      {"text", OutputFormat::Text}, {"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};
  app.add_option("--output", output, "Output format")
      ->transform(CLI::CheckedTransformer(output_names, CLI::ignore_case))
      ->option_text("text|csv|json [text]");

  // ingest
  std::string ingest_file, ingest_format;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse and clean a corpus file, print its id");
  ingest_cmd->add_option("file", ingest_file, "JSON Lines or CSV corpus")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--format", ingest_format, "jsonl or csv (default: from extension)");

  // search
  std::string search_corpus, search_format, search_query, search_backend, search_config;
  std::size_t search_parallelism = 0;
  auto* search_cmd = app.add_subcommand("search", "Run a query file over a corpus");
  search_cmd->add_option("corpus", search_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--format", search_format, "jsonl or csv (default: from extension)");
  search_cmd->add_option("--query", search_query, "Query spec (JSON)")->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--backend", search_backend, "Backend name from the config");
  search_cmd->add_option("--config", search_config, "Service config with a backend registry")->check(CLI::ExistingFile);
  search_cmd->add_option("--parallelism", search_parallelism, "Worker threads (0 = all processors)");

  // eval
  std::string eval_search, eval_gold, eval_label = "K", eval_target;
  auto* eval_cmd = app.add_subcommand("eval", "Score a saved search result against gold relevance");
  eval_cmd->add_option("--search-output", eval_search, "JSON written by `search --output json`")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", eval_gold, "Gold JSON Lines")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--label", eval_label, "Row label");
  eval_cmd->add_option("--target-stance", eval_target, "Stance that counts as relevant in stance gold");

  // report
  std::string report_suite, report_gold, report_corpus, report_format, report_backend, report_config, report_target;
  std::size_t report_parallelism = 0;
  auto* report_cmd = app.add_subcommand("report", "Run a suite of queries and print a P/R/F1 table");
  report_cmd->add_option("--suite", report_suite, "Suite file (JSON)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--gold", report_gold, "Gold JSON Lines")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--corpus", report_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--format", report_format, "jsonl or csv (default: from extension)");
  report_cmd->add_option("--backend", report_backend, "Backend name from the config");
  report_cmd->add_option("--config", report_config, "Service config with a backend registry")->check(CLI::ExistingFile);
  report_cmd->add_option("--target-stance", report_target, "Stance that counts as relevant in stance gold");
  report_cmd->add_option("--parallelism", report_parallelism, "Worker threads (0 = all processors)");

  // build-dataset
  std::string build_task, build_sources, build_out;
  std::optional<std::uint64_t> build_seed;
  auto* build_cmd = app.add_subcommand("build-dataset", "Assemble a training/validation set from source files");
  build_cmd->add_option("task", build_task, "sa, absa or sd")->required()->check(CLI::IsMember({"sa", "absa", "sd"}));
  build_cmd->add_option("--sources", build_sources, "Source manifest (JSON)")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--out", build_out, "Output directory")->required();
  build_cmd->add_option("--seed", build_seed, "Seed for placeholder replacement (required for absa)");

  // claims
  std::string claims_template;
  bool claims_negate = false;
  auto* claims_cmd = app.add_subcommand("claims", "Expand a claim template file");
  claims_cmd->add_option("--template", claims_template, "Claim template file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  claims_cmd->add_flag("--negate", claims_negate, "Prefix every claim with the negation prefix");

  // encode
  std::string encode_vocab, encode_claim, encode_text;
  auto* encode_cmd = app.add_subcommand("encode", "WordPiece-encode a text (and optional claim) to 192 ids");
  encode_cmd->add_option("--vocab", encode_vocab, "Vocabulary, one token per line")->required()->check(CLI::ExistingFile);
  encode_cmd->add_option("--claim", encode_claim, "Claim for a pair encoding");
  encode_cmd->add_option("text", encode_text, "Raw text")->required();

  // serve
  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", serve_config, "Service config (JSON)")->check(CLI::ExistingFile);

  app.add_subcommand("recipe", "Print the training recipe and head geometry");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (app.get_subcommands().empty()) err << "run with --help for usage\n";
    return 1;
  }

  try {
    if (*ingest_cmd) {
      const Corpus corpus = load_corpus(ingest_file, ingest_format);
      if (output == OutputFormat::Json) {
        out << nlohmann::json{{"corpus_id", corpus.corpus_id()}, {"documents", corpus.size()}}.dump() << '\n';
      } else if (output == OutputFormat::Csv) {
        out << "corpus_id,documents\n" << corpus.corpus_id() << ',' << corpus.size() << '\n';
      } else {
        out << corpus.corpus_id() << "  " << corpus.size() << " documents\n";
      }
    } else if (*search_cmd) {
      const Corpus corpus = load_corpus(search_corpus, search_format);
      const Query query = query_from_json(load_json_file(search_query));
      const auto backend = pick_backend(search_config, search_backend, query.required_capability() != 0);
      const SearchResult result = run_search(query, corpus, backend.get(), {search_parallelism, 0.10});
      if (output == OutputFormat::Json) {
        out << search_result_to_json(result).dump(2) << '\n';
      } else if (output == OutputFormat::Csv) {
        out << "doc_id,rule_fired,classifier_output\n";
        for (const auto& r : result.rationales) {
          out << csv_field(r.doc_id) << ',' << csv_field(r.rule_fired) << ',' << csv_field(r.classifier_output) << '\n';
        }
      } else {
        for (const auto& r : result.rationales) {
          out << r.doc_id << '\t' << r.rule_fired;
          if (!r.classifier_output.empty()) out << '\t' << r.classifier_output;
          out << '\n';
        }
      }
      if (!result.skipped.empty()) err << result.skipped.size() << " documents skipped after classifier errors\n";
    } else if (*eval_cmd) {
      const auto saved = load_json_file(eval_search);
      std::vector<std::string> predicted;
      try {
        predicted = saved.at("doc_ids").get<std::vector<std::string>>();
      } catch (const nlohmann::json::exception&) {
        throw UserError("'" + eval_search + "' has no 'doc_ids' list");
      }
      const GoldRelevance gold = load_gold(eval_gold, stance_arg(eval_target));
      const std::size_t skipped = saved.contains("skipped") && saved["skipped"].is_array() ? saved["skipped"].size() : 0;
      Report report{{score_row(eval_label, predicted, gold, skipped)}};
      print_report(report, output, out);
    } else if (*report_cmd) {
      const Corpus corpus = load_corpus(report_corpus, report_format);
      const auto rows = load_suite(report_suite);
      bool needs_backend = false;
      for (const auto& r : rows) needs_backend = needs_backend || r.query.required_capability() != 0;
      const auto backend = pick_backend(report_config, report_backend, needs_backend);
      const GoldRelevance gold = load_gold(report_gold, stance_arg(report_target));
      print_report(emit_report(rows, corpus, gold, backend.get(), {report_parallelism, 0.10}), output, out);
    } else if (*build_cmd) {
      const DatasetTask task = parse_dataset_task(build_task);
      if (task == DatasetTask::ABSA && !build_seed) throw UserError("absa builds need --seed");
      const auto manifest = build_dataset_from_manifest(task, build_sources, build_out, build_seed.value_or(0));
      if (output == OutputFormat::Json) {
        out << manifest.dump(2) << '\n';
      } else {
        out << "train " << manifest["train"]["total"].get<std::size_t>() << ", validation "
            << manifest["validation"]["total"].get<std::size_t>() << " -> " << build_out << '\n';
      }
    } else if (*claims_cmd) {
      const auto claims = expand_claims(claim_templates_from_json(load_json_file(claims_template)), claims_negate);
      if (output == OutputFormat::Json) {
        out << nlohmann::json(claims).dump(2) << '\n';
      } else if (output == OutputFormat::Csv) {
        out << "n,claim\n";
        for (std::size_t i = 0; i < claims.size(); ++i) out << i + 1 << ',' << csv_field(claims[i]) << '\n';
      } else {
        for (const auto& c : claims) out << c << '\n';
      }
    } else if (*encode_cmd) {
      const Vocabulary vocab = Vocabulary::load(encode_vocab);
      const std::string text = clean_text(encode_text).text;
      const TokenSequence seq = encode_claim.empty()
                                    ? encode_single(text, vocab)
                                    : encode_pair(clean_text(encode_claim).text, text, vocab);
      out << nlohmann::json{{"ids", seq.ids},
                            {"segment_ids", seq.segment_ids},
                            {"actual_length", seq.actual_length},
                            {"truncated", seq.truncated}}
                 .dump()
          << '\n';
    } else if (*serve_cmd) {
      const ServiceConfig config =
          load_config(serve_config.empty() ? std::nullopt : std::optional(std::filesystem::path(serve_config)));
      return run_service(config, [&](int port) { out << "listening " << port << std::endl; });
    } else {
      nlohmann::json heads = nlohmann::json::object();
      for (auto [name, kind] : {std::pair{"SA", HeadKind::SA}, {"SD", HeadKind::SD}, {"ABSA", HeadKind::ABSA}}) {
        const HeadGeometry g = head_geometry(kind);
        heads[name] = {{"input_dim", g.input_dim},
                       {"output_nodes", g.output_nodes},
                       {"parameters", g.parameter_count},
                       {"shared_across_tokens", g.shared_across_tokens}};
      }
      out << nlohmann::json{{"recipe", TrainingRecipe{}.to_json()},
                            {"max_tokens", kDefaultGeometry.max_tokens},
                            {"embed_dim", kDefaultGeometry.embed_dim},
                            {"flattened_dim", kDefaultGeometry.flattened_dim()},
                            {"heads", heads}}
                 .dump(2)
          << '\n';
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace infotriage
