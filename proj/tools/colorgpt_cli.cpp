// colorgpt command-line entry point.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "colorgpt/bench.hpp"
#include "colorgpt/codec.hpp"
#include "colorgpt/config.hpp"
#include "colorgpt/document.hpp"
#include "colorgpt/errors.hpp"
#include "colorgpt/image.hpp"
#include "colorgpt/ingest.hpp"
#include "colorgpt/log.hpp"
#include "colorgpt/naming.hpp"
#include "colorgpt/report.hpp"
#include "colorgpt/retrieval.hpp"
#include "colorgpt/service.hpp"

namespace {

using namespace colorgpt;
using ojson = nlohmann::ordered_json;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallel;
  std::string record;
  std::string replay;
  std::string color_dict;
  std::string templates;
  std::string log_level;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_config_json(const GlobalOptions& g) {
  if (g.config.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(read_text(g.config), nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(g.config + ": " + e.what());
  }
}

std::filesystem::path config_dir(const GlobalOptions& g) {
  return g.config.empty() ? std::filesystem::path() : std::filesystem::path(g.config).parent_path();
}

void apply_globals(RunConfig& c, const GlobalOptions& g) {
  if (g.seed) c.seed = *g.seed;
  if (g.parallel) c.parallel = *g.parallel;
  if (!g.record.empty()) c.record = g.record;
  if (!g.replay.empty()) c.replay = g.replay;
  if (!g.color_dict.empty()) c.dictionary = g.color_dict;
  if (!g.templates.empty()) c.templates = g.templates;
}

RunConfig run_config(const GlobalOptions& g, PromptConfig::Task task) {
  auto j = read_config_json(g);
  const char* name = task == PromptConfig::Task::Completion ? "completion" : "generation";
  if (j.contains("task") && j["task"] != name) {
    throw ValidationError("config task is '" + j["task"].get<std::string>() + "', expected '" + name + "'");
  }
  j["task"] = name;
  auto c = RunConfig::from_json(j, config_dir(g));
  apply_globals(c, g);
  return c;
}

ServiceConfig service_config(const GlobalOptions& g) {
  auto j = read_config_json(g);
  j.erase("task");
  j.erase("arms");
  j.erase("matrix");
  auto c = ServiceConfig::from_json(j, config_dir(g));
  apply_globals(c.run, g);
  return c;
}

ColorDictionary dictionary_for(const GlobalOptions& g, bool required) {
  std::filesystem::path p = g.color_dict;
  if (p.empty() && std::filesystem::exists(kDefaultDictionaryPath)) p = kDefaultDictionaryPath;
  if (p.empty()) {
    if (required) throw ValidationError("this representation needs --color-dict");
    return {};
  }
  return load_dictionary(p);
}

int print_reply(const HttpReply& r) {
  std::cout << ojson::parse(r.body).dump(2) << "\n";
  if (r.status == 200) return kExitOk;
  return r.status == 400 ? kExitValidation : kExitProvider;
}

int finish_report(const MetricsReport& report, const RunConfig& cfg, const std::string& out) {
  const std::filesystem::path dir = !out.empty() ? std::filesystem::path(out) : cfg.output_dir;
  if (!dir.empty()) {
    for (const auto& p : emit_report(report, dir)) std::cerr << "wrote " << p.string() << "\n";
  } else {
    std::cout << to_json(report).dump(2) << "\n";
  }
  for (const auto& a : report.arms) {
    std::cerr << a.name << ":";
    if (report.task == "completion") {
      for (const auto& s : a.by_mask_count) std::cerr << " acc@" << s.k << "=" << s.accuracy;
    } else {
      std::cerr << " similarity=" << a.similarity.mean << " diversity=" << a.diversity.mean;
    }
    std::cerr << " (" << a.total_cases << " cases, " << a.parse_failures << " unparsed, " << a.provider_failures
              << " provider failures)\n";
  }
  return exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ColorGPT palette completion and generation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Global seed");
  app.add_option("--parallel", g.parallel, "Concurrent requests");
  app.add_option("--record", g.record, "Append every LLM exchange to this JSON Lines audit log");
  app.add_option("--replay", g.replay, "Answer LLM requests from an audit log");
  app.add_option("--color-dict", g.color_dict, "Color dictionary (name<TAB>#rrggbb lines)");
  app.add_option("--templates", g.templates, "Prompt template directory");
  app.add_option("--log-level", g.log_level, "debug, info, warn, error or off");

  // convert-color
  auto* convert = app.add_subcommand("convert-color", "Convert a color between representations");
  std::string conv_value, conv_from = "hex", conv_to = "cielab";
  convert->add_option("value", conv_value, "Color text, e.g. \"#ff7f00\" or \"[255, 127, 0]\"")->required();
  convert->add_option("--from", conv_from, "Input representation");
  convert->add_option("--to", conv_to, "Output representation, or 'all'");

  // extract-palette
  auto* extract = app.add_subcommand("extract-palette", "Extract a palette from a PNG or BMP image");
  std::string image_path;
  ExtractOptions extract_opts;
  extract->add_option("image", image_path)->required();
  extract->add_option("--max-colors", extract_opts.max_colors);
  extract->add_option("--min-delta-e", extract_opts.min_delta_e);

  // mask
  auto* mask = app.add_subcommand("mask", "Mask k palette slots of a document");
  std::string mask_doc;
  int mask_k = 1;
  mask->add_option("document", mask_doc, "Document JSON file, or - for stdin")->required();
  mask->add_option("-k", mask_k, "Number of slots to mask (1-3)");

  // build-index
  auto* index_cmd = app.add_subcommand("build-index", "Embed an exemplar corpus into an index file");
  std::string idx_corpus, idx_manifest, idx_pat, idx_split = "train", idx_out;
  index_cmd->add_option("--corpus", idx_corpus, "Completion documents (JSON Lines)");
  index_cmd->add_option("--manifest", idx_manifest, "Split manifest for --corpus");
  index_cmd->add_option("--pat", idx_pat, "Text/palette pairs (CSV or JSON Lines)");
  index_cmd->add_option("--split", idx_split, "Split to index");
  index_cmd->add_option("--out", idx_out)->required();

  // complete / generate
  auto* complete = app.add_subcommand("complete", "Suggest colors for the [MASK] slots of a document");
  std::string complete_doc;
  complete->add_option("document", complete_doc, "Masked document JSON file, or - for stdin")->required();
  auto* generate = app.add_subcommand("generate", "Generate a five-color palette from text");
  std::string generate_text;
  generate->add_option("text", generate_text)->required();

  // eval
  auto* eval_completion = app.add_subcommand("eval-completion", "Run the completion benchmark");
  auto* eval_generation = app.add_subcommand("eval-generation", "Run the generation benchmark");
  std::string eval_out;
  eval_completion->add_option("--out", eval_out, "Report directory");
  eval_generation->add_option("--out", eval_out, "Report directory");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP recommendation service");
  std::optional<int> serve_port;
  std::string serve_host;
  serve->add_option("--port", serve_port);
  serve->add_option("--host", serve_host);

  // report
  auto* report_cmd = app.add_subcommand("report", "Re-emit CSV and HTML from a report.json");
  std::string report_in, report_out;
  report_cmd->add_option("report", report_in)->required();
  report_cmd->add_option("--out", report_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!g.log_level.empty()) {
      static const std::map<std::string, LogLevel> levels{{"debug", LogLevel::Debug}, {"info", LogLevel::Info},
                                                          {"warn", LogLevel::Warn},   {"error", LogLevel::Error},
                                                          {"off", LogLevel::Off}};
      const auto it = levels.find(g.log_level);
      if (it == levels.end()) throw ValidationError("unknown log level '" + g.log_level + "'");
      set_log_level(it->second);
    }

    if (*convert) {
      const auto from = Representation::parse(conv_from);
      const bool words = from.kind == Representation::Kind::Word || from.kind == Representation::Kind::WordHex ||
                         conv_to == "word" || conv_to == "all" || conv_to.rfind("wordhex", 0) == 0;
      const auto dict = dictionary_for(g, words);
      HashingEmbedder embedder;
      const Color c = ColorCodec(from, &dict, &embedder).decode_text(conv_value);
      if (conv_to == "all") {
        for (const char* name : {"hex", "rgb", "cielab", "word", "wordhex-h"}) {
          std::cout << name << "\t" << ColorCodec(Representation::parse(name), &dict, &embedder).encode_text(c)
                    << "\n";
        }
      } else {
        std::cout << ColorCodec(Representation::parse(conv_to), &dict, &embedder).encode_text(c) << "\n";
      }
      return kExitOk;
    }

    if (*extract) {
      const auto palette = extract_palette(read_image(image_path), extract_opts);
      ojson out = ojson::array();
      for (Color c : palette.colors()) out.push_back(color_to_hex(c));
      std::cout << out.dump() << "\n";
      return kExitOk;
    }

    if (*mask) {
      const Document d = parse_document(read_text(mask_doc));
      auto [masked, record] = mask_palette(d, mask_k, g.seed.value_or(0));
      ojson out{{"document", document_to_json(masked)}, {"mask", to_json(record)}};
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    if (*index_cmd) {
      if (idx_corpus.empty() == idx_pat.empty()) throw ValidationError("give exactly one of --corpus or --pat");
      auto j = read_config_json(g);
      j["task"] = idx_pat.empty() ? "completion" : "generation";
      const auto cfg = RunConfig::from_json(j, config_dir(g));
      std::vector<CorpusItem> items;
      if (!idx_corpus.empty()) {
        const auto docs = ingest_completion_corpus(idx_corpus);
        items = idx_manifest.empty() ? completion_corpus(docs)
                                     : completion_corpus(select_split(docs, load_split_manifest(idx_manifest), idx_split));
      } else {
        items = generation_corpus(pat_split(ingest_pat(idx_pat, g.seed.value_or(cfg.pat_split_seed)), idx_split));
      }
      std::shared_ptr<EmbeddingProvider> embedder;
      if (cfg.embedder.kind == EmbedderConfig::Kind::Hashing) {
        embedder = std::make_shared<HashingEmbedder>(cfg.embedder.dimension);
      } else {
        embedder = std::make_shared<CachingEmbedder>(std::make_shared<RemoteEmbedder>(cfg.embedder.remote),
                                                     cfg.embedder.cache);
      }
      BuildOptions opts;
      opts.parallelism = static_cast<std::size_t>(g.parallel.value_or(cfg.parallel));
      const auto index = build_index(items, *embedder, opts);
      index.save(idx_out);
      if (auto* caching = dynamic_cast<CachingEmbedder*>(embedder.get())) caching->save();
      std::cerr << "indexed " << index.size() << " exemplars with " << index.provider_name() << " into " << idx_out
                << "\n";
      return kExitOk;
    }

    if (*complete) {
      RecService service(service_config(g));
      ojson body{{"document", ojson::parse(read_text(complete_doc))}};
      return print_reply(service.complete(body.dump()));
    }

    if (*generate) {
      RecService service(service_config(g));
      return print_reply(service.generate(ojson{{"text", generate_text}}.dump()));
    }

    if (*eval_completion) {
      const auto cfg = run_config(g, PromptConfig::Task::Completion);
      return finish_report(run_completion(cfg), cfg, eval_out);
    }

    if (*eval_generation) {
      const auto cfg = run_config(g, PromptConfig::Task::Generation);
      return finish_report(run_generation(cfg), cfg, eval_out);
    }

    if (*serve) {
      auto cfg = service_config(g);
      if (serve_port) cfg.port = *serve_port;
      if (!serve_host.empty()) cfg.host = serve_host;
      RecService service(cfg);
      const int port = service.start();
      std::cerr << "serving on http://" << cfg.host << ":" << port << "/v1\n";
      service.wait();
      return kExitOk;
    }

    if (*report_cmd) {
      const auto report = report_from_json(ojson::parse(read_text(report_in)));
      for (const auto& p : emit_report(report, report_out)) std::cerr << "wrote " << p.string() << "\n";
      return kExitOk;
    }
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const ReplyError& e) {
    std::cerr << "unusable reply: " << e.what() << "\n";
    return kExitProvider;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
