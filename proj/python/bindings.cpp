#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <colorgpt/bench.hpp>
#include <colorgpt/color.hpp>
#include <colorgpt/document.hpp>
#include <colorgpt/errors.hpp>
#include <colorgpt/image.hpp>
#include <colorgpt/llm.hpp>
#include <colorgpt/log.hpp>
#include <colorgpt/metrics.hpp>
#include <colorgpt/naming.hpp>
#include <colorgpt/report.hpp>
#include <colorgpt/service.hpp>

#include <map>
#include <memory>

namespace py = pybind11;
using namespace colorgpt;

namespace {

using Rgb = std::tuple<int, int, int>;

Color to_color(const Rgb& t) {
  const auto [r, g, b] = t;
  for (int v : {r, g, b}) {
    if (v < 0 || v > 255) throw ValidationError("channel value " + std::to_string(v) + " is outside 0..255");
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

Rgb to_tuple(Color c) { return {c.r, c.g, c.b}; }

std::vector<Color> colors_of(const std::vector<std::string>& hexes) {
  std::vector<Color> out;
  out.reserve(hexes.size());
  for (const auto& h : hexes) out.push_back(hex_to_color(h));
  return out;
}

std::vector<std::string> hexes_of(const std::vector<Color>& colors) {
  std::vector<std::string> out;
  out.reserve(colors.size());
  for (Color c : colors) out.push_back(color_to_hex(c));
  return out;
}

// Dictionary plus the fallback embedder used for out-of-dictionary words.
struct Namer {
  ColorDictionary dict;
  HashingEmbedder embedder;
};

}  // namespace

PYBIND11_MODULE(_colorgpt, m) {
  m.doc() = "Palette completion and generation toolkit (native core)";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<ProviderError>(m, "ProviderError", error.ptr());

  m.def("set_log_level", [](const std::string& level) {
    static const std::map<std::string, LogLevel> levels{{"debug", LogLevel::Debug}, {"info", LogLevel::Info},
                                                        {"warn", LogLevel::Warn},   {"error", LogLevel::Error},
                                                        {"off", LogLevel::Off}};
    const auto it = levels.find(level);
    if (it == levels.end()) throw ValidationError("unknown log level '" + level + "'");
    set_log_level(it->second);
  });

  m.def("hex_to_rgb", [](const std::string& hex) { return to_tuple(hex_to_color(hex)); });
  m.def("rgb_to_hex", [](const Rgb& c) { return color_to_hex(to_color(c)); });
  m.def("rgb_to_lab", [](const Rgb& c) {
    const auto lab = color_to_lab(to_color(c));
    return std::make_tuple(lab.l, lab.a, lab.b);
  });
  m.def("lab_to_rgb", [](double l, double a, double b) { return to_tuple(lab_to_color({l, a, b})); });
  m.def("delta_e", [](const std::string& x, const std::string& y) { return delta_e(hex_to_color(x), hex_to_color(y)); });

  py::class_<Namer, std::shared_ptr<Namer>>(m, "ColorNamer")
      .def(py::init([](const std::filesystem::path& path) {
             auto n = std::make_shared<Namer>();
             n->dict = load_dictionary(path);
             return n;
           }),
           py::arg("dictionary_path"))
      .def("__len__", [](const Namer& n) { return n.dict.size(); })
      .def("hex_to_word", [](const Namer& n, const std::string& hex) { return hex_to_word(hex_to_color(hex), n.dict); })
      .def("word_to_hex", [](const Namer& n, const std::string& word) {
        return color_to_hex(word_to_hex(word, n.dict, n.embedder));
      });

  m.def("bin_accuracy", [](const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& cases) {
    std::vector<AccuracyCase> c;
    for (const auto& [pred, truth] : cases) c.push_back({colors_of(pred), colors_of(truth)});
    return bin_accuracy(c);
  });
  m.def("distribution", [](const std::vector<std::string>& hexes) { return distribution(colors_of(hexes)); });
  m.def(
      "palette_similarity",
      [](const std::vector<std::string>& p, const std::vector<std::string>& q, const std::string& strategy,
         const std::string& space) {
        return palette_similarity(Palette::of(colors_of(p)), Palette::of(colors_of(q)),
                                  parse_similarity_strategy(strategy), parse_distance_space(space));
      },
      py::arg("p"), py::arg("q"), py::arg("strategy") = "min_assignment", py::arg("space") = "lab");
  m.def(
      "palette_diversity",
      [](const std::vector<std::string>& p, const std::string& space) {
        return palette_diversity(Palette::of(colors_of(p)), parse_distance_space(space));
      },
      py::arg("palette"), py::arg("space") = "lab");

  m.def("normalize_document", [](const std::string& text) { return serialize_document(parse_document(text)); });
  m.def(
      "mask_document",
      [](const std::string& text, int k, std::uint64_t seed) {
        auto [masked, record] = mask_palette(parse_document(text), k, seed);
        return std::make_pair(serialize_document(masked), to_json(record).dump());
      },
      py::arg("document"), py::arg("k"), py::arg("seed") = 0);

  m.def("extract_json", [](const std::string& reply) -> py::object {
    const auto r = extract_json(reply);
    if (!r.ok()) return py::none();
    return py::str(r.value->dump());
  });

  m.def(
      "extract_palette",
      [](const std::filesystem::path& path, std::size_t max_colors) {
        ExtractOptions opts;
        opts.max_colors = max_colors;
        return hexes_of(extract_palette(read_image(path), opts).colors());
      },
      py::arg("path"), py::arg("max_colors") = 5);

  m.def(
      "run_benchmark",
      [](const std::filesystem::path& config, const std::filesystem::path& out) {
        const auto cfg = RunConfig::load(config);
        MetricsReport report;
        {
          py::gil_scoped_release release;
          report = cfg.task == PromptConfig::Task::Completion ? run_completion(cfg) : run_generation(cfg);
        }
        if (!out.empty()) emit_report(report, out);
        return to_json(report).dump();
      },
      py::arg("config"), py::arg("out") = std::filesystem::path{});

  py::class_<RecService>(m, "Service")
      .def(py::init([](const std::filesystem::path& config) {
             return std::make_unique<RecService>(ServiceConfig::load(config));
           }),
           py::arg("config"))
      .def("complete",
           [](const RecService& s, const std::string& body) {
             py::gil_scoped_release release;
             const auto r = s.complete(body);
             return std::make_pair(r.status, r.body);
           })
      .def("generate",
           [](const RecService& s, const std::string& body) {
             py::gil_scoped_release release;
             const auto r = s.generate(body);
             return std::make_pair(r.status, r.body);
           })
      .def("health", [](const RecService& s) {
        const auto r = s.health();
        return std::make_pair(r.status, r.body);
      });
}
