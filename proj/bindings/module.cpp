// Python bindings for the core operations: binarization, trained embedding,
// training, augmentation and typo injection. Matrices cross the boundary as
// numpy arrays via the Eigen casters.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "retcore/augment.hpp"
#include "retcore/encoder.hpp"
#include "retcore/errors.hpp"
#include "retcore/eval.hpp"
#include "retcore/model.hpp"
#include "retcore/parallel.hpp"
#include "retcore/trainer.hpp"
#include "retcore/version.hpp"
#include "retcore/weights_io.hpp"

namespace py = pybind11;

namespace {

using namespace retcore;

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

struct PyModel {
  ModelWeights<float> weights;
  ModelConfig config;

  EncoderConfig encoder() const {
    EncoderConfig enc;
    enc.max_word_len = config.max_word_len;
    enc.bits_per_char = config.char_dim;
    return enc;
  }

  MatF embed(const std::vector<std::string>& words, int threads) const {
    return embed_batch(words, weights, config, encoder(), resolve_thread_count(threads));
  }
};

struct PyAugmenter {
  ResourceTables tables;
  AugmentationPolicy policy;
  Rng rng;

  PyAugmenter(const std::vector<std::string>& vocab, std::uint64_t seed, int max_typos,
              double max_typo_fraction)
      : tables(build_tables(vocab)), rng(seed) {
    policy.max_typos = max_typos;
    policy.max_typo_fraction = max_typo_fraction;
    policy.validate();
  }

  std::string view(const std::string& token) { return augment_token(token, policy, tables, rng); }

  std::vector<std::string> views(const std::string& token, int count) {
    if (count < 0) throw ConfigError("count must be >= 0");
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(view(token));
    return out;
  }

  std::string typos(const std::string& text, double rate, std::uint64_t seed,
                    const std::vector<std::string>& kinds, const std::vector<int>& blocks) {
    TypoInjectorConfig cfg;
    cfg.word_typo_rate = rate;
    cfg.seed = seed;
    cfg.block_sizes = blocks;
    if (!kinds.empty()) {
      cfg.typo_kinds.clear();
      for (const auto& name : kinds) cfg.typo_kinds.push_back(typo_kind_from_name(name));
    }
    cfg.validate();
    return inject_typos(text, cfg, tables);
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "stateless word vectorizer and metric-embedding core";
  m.attr("__version__") = kVersion;
  m.attr("WEIGHTS_FORMAT_VERSION") = kWeightsFormatVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("tokenize", &tokenize, py::arg("text"),
        "Split text into words at Unicode whitespace.");

  m.def(
      "encode_words",
      [](const std::vector<std::string>& words, int max_word_len, int bits_per_char,
         int threads) {
        EncoderConfig cfg;
        cfg.max_word_len = max_word_len;
        cfg.bits_per_char = bits_per_char;
        cfg.validate();
        const unsigned resolved = resolve_thread_count(threads);
        py::gil_scoped_release release;
        return encode_words(words, cfg, resolved);
      },
      py::arg("words"), py::arg("max_word_len") = 16, py::arg("bits_per_char") = 24,
      py::arg("threads") = 1,
      "Binarize words into a float32 matrix of 0/1 codepoint bits, one row per word.");

  py::class_<PyModel>(m, "Model")
      .def_static(
          "load",
          [](const std::string& path) {
            LoadedWeights loaded = load_weights(path);
            return PyModel{std::move(loaded.weights), std::move(loaded.config)};
          },
          py::arg("path"), "Load trained weights from a .rvec container.")
      .def(
          "save",
          [](const PyModel& self, const std::string& path) {
            save_weights(self.weights, self.config, path,
                         nlohmann::json{{"command", "python"}, {"version", kVersion}});
          },
          py::arg("path"))
      .def(
          "embed",
          [](const PyModel& self, const std::vector<std::string>& words, int threads) {
            py::gil_scoped_release release;
            return self.embed(words, threads);
          },
          py::arg("words"), py::arg("threads") = 1,
          "Embed words into the metric space, one row per word.")
      .def_property_readonly("embedding_dim",
                             [](const PyModel& self) { return self.config.embedding_dim; })
      .def_property_readonly("parameter_count",
                             [](const PyModel& self) { return self.config.parameter_count(); })
      .def_property_readonly("config",
                             [](const PyModel& self) {
                               return json_to_py(nlohmann::json(self.config));
                             })
      .def("__repr__", [](const PyModel& self) {
        return "<retcore.Model dim=" + std::to_string(self.config.embedding_dim) + " params=" +
               std::to_string(self.config.parameter_count()) + ">";
      });

  m.def(
      "train",
      [](const std::vector<std::string>& vocab, int steps, int batch_size, double peak_lr,
         double end_lr, int warmup, double alpha, double beta, double lambda_, double margin,
         double weight_decay, double augmented_share, std::uint64_t seed) {
        ModelConfig model_cfg;
        TrainConfig tc;
        tc.steps = steps;
        tc.batch_size = batch_size;
        tc.peak_lr = peak_lr;
        tc.end_lr = end_lr;
        tc.warmup_steps = warmup;
        tc.weight_decay = weight_decay;
        tc.augmented_share = augmented_share;
        tc.seed = seed;
        MSLossConfig loss;
        loss.alpha = alpha;
        loss.beta = beta;
        loss.lambda = lambda_;
        loss.epsilon_margin = margin;
        const AugmentationPolicy policy;
        const auto tables = build_tables(vocab);

        TrainResult result;
        {
          py::gil_scoped_release release;
          EncoderConfig enc;
          enc.max_word_len = model_cfg.max_word_len;
          enc.bits_per_char = model_cfg.char_dim;
          result = train(vocab, model_cfg, tc, loss, tables, policy, enc);
        }

        MatD log(static_cast<Eigen::Index>(result.log.size()), 3);
        for (Eigen::Index i = 0; i < log.rows(); ++i) {
          const auto& row = result.log[static_cast<std::size_t>(i)];
          log(i, 0) = row.step;
          log(i, 1) = row.lr;
          log(i, 2) = row.loss;
        }
        return py::make_tuple(PyModel{std::move(result.weights), model_cfg}, log);
      },
      py::arg("vocab"), py::arg("steps") = 5000, py::arg("batch_size") = 128,
      py::arg("peak_lr") = 1e-3, py::arg("end_lr") = 1e-4, py::arg("warmup") = 100,
      py::arg("alpha") = 4.0, py::arg("beta") = 40.0, py::arg("lambda_") = 0.5,
      py::arg("margin") = 0.1, py::arg("weight_decay") = 0.0, py::arg("augmented_share") = 0.8,
      py::arg("seed") = 1,
      "Train embedding weights on a vocabulary; returns (Model, log) where log rows are "
      "(step, lr, loss).");

  py::class_<PyAugmenter>(m, "Augmenter")
      .def(py::init<const std::vector<std::string>&, std::uint64_t, int, double>(),
           py::arg("vocab"), py::arg("seed") = 1, py::arg("max_typos") = 4,
           py::arg("max_typo_fraction") = 0.25,
           "Typo/noise generator with resource tables built from a vocabulary.")
      .def("view", &PyAugmenter::view, py::arg("token"),
           "One augmented view of a token; advances the internal rng.")
      .def("views", &PyAugmenter::views, py::arg("token"), py::arg("count"))
      .def("typos", &PyAugmenter::typos, py::arg("text"), py::arg("rate") = 0.1,
           py::arg("seed") = 1, py::arg("kinds") = std::vector<std::string>{},
           py::arg("blocks") = std::vector<int>{1, 2},
           "Corrupt a text corpus word-by-word, preserving untouched bytes.");
}
