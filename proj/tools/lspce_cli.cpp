// Command-line front end: build, study, eval, postproc.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lspce/commands.hpp"
#include "lspce/error.hpp"
#include "lspce/persistence.hpp"

namespace {

template <typename T>
struct Flag {
  T value{};
  CLI::Option* option = nullptr;

  void apply(std::optional<T>& slot) const {
    if (option && option->count()) slot = value;
  }
};

struct SharedFlags {
  Flag<std::string> model, dataset, bounds, out, config;
  Flag<std::uint64_t> seed;
  Flag<std::size_t> budget, batch, max_terms;
  Flag<double> target;
  std::vector<std::string> criteria, limits;

  void add_to(CLI::App& app) {
    model.option = app.add_option("--model", model.value, "Registered model: waveguide-sf, waveguide-bb, poly-2d");
    dataset.option = app.add_option("--dataset", dataset.value, "Dataset CSV (y1,...,yN,g) instead of a model");
    bounds.option = app.add_option("--bounds", bounds.value, "Input bounds lo:hi,lo:hi,... or a model name");
    app.add_option("--criterion", criteria, "Gate criterion K, E or A");
    app.add_option("--limit", limits, "Gate limit, e.g. 10 or sqrt(3)");
    seed.option = app.add_option("--seed", seed.value, "Seed (study: seed of the first replicate)");
    budget.option = app.add_option("--budget", budget.value, "Maximum number of model evaluations");
    batch.option = app.add_option("--batch", batch.value, "Points added per dataset expansion");
    max_terms.option = app.add_option("--max-terms", max_terms.value, "Maximum number of basis terms");
    target.option = app.add_option("--target-error", target.value, "Stop when the held-out error reaches this");
    out.option = app.add_option("--out", out.value, "Output directory");
    config.option = app.add_option("--config", config.value, "JSON config with the same keys as the flags");
  }

  lspce::CommandOptions collect() const {
    lspce::CommandOptions o;
    model.apply(o.model);
    dataset.apply(o.dataset);
    bounds.apply(o.bounds);
    out.apply(o.out);
    seed.apply(o.seed);
    budget.apply(o.budget);
    batch.apply(o.batch);
    max_terms.apply(o.max_terms);
    target.apply(o.target_error);
    o.criteria = criteria;
    o.limits = limits;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive least-squares polynomial chaos surrogates"};
  app.require_subcommand(1);

  SharedFlags build_flags;
  auto* build = app.add_subcommand("build", "Build one surrogate");
  build_flags.add_to(*build);

  SharedFlags study_flags;
  Flag<std::size_t> replicates, cv_size, threads;
  Flag<std::uint64_t> cv_seed;
  std::vector<std::string> gates;
  auto* study = app.add_subcommand("study", "Repeated builds over random designs");
  study_flags.add_to(*study);
  replicates.option = study->add_option("--replicates", replicates.value, "Number of random designs");
  cv_size.option = study->add_option("--cv-size", cv_size.value, "Cross-validation sample size");
  cv_seed.option = study->add_option("--cv-seed", cv_seed.value, "Cross-validation seed");
  threads.option = study->add_option("--threads", threads.value, "Worker threads (0 = all cores)");
  study->add_option("--gate", gates, "Criterion and limit as K:10 (repeatable)");

  std::string model_file, points_file, eval_out;
  auto* eval = app.add_subcommand("eval", "Evaluate a saved model at points from a CSV");
  eval->add_option("model", model_file, "Model file")->required();
  eval->add_option("points", points_file, "Points CSV (y1,...,yN)")->required();
  auto* eval_out_opt = eval->add_option("--out", eval_out, "Predictions CSV (default stdout)");

  std::string post_model, post_out;
  auto* post = app.add_subcommand("postproc", "Moments and Sobol indices of a saved model");
  post->add_option("model", post_model, "Model file")->required();
  auto* post_out_opt = post->add_option("--out", post_out, "Sobol CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: usage: " << msg << "\n";
    return 2;
  }

  try {
    auto with_config = [](const SharedFlags& flags) {
      lspce::CommandOptions o = flags.collect();
      if (flags.config.option->count()) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(lspce::read_text_file(flags.config.value));
        } catch (const nlohmann::json::exception& e) {
          throw lspce::Error("parse", "config '" + flags.config.value + "': " + e.what());
        }
        lspce::merge_config(o, doc);
      }
      return o;
    };

    if (*build) {
      lspce::cmd_build(with_config(build_flags), std::cerr);
    } else if (*study) {
      lspce::CommandOptions o = study_flags.collect();
      replicates.apply(o.replicates);
      cv_size.apply(o.cv_size);
      cv_seed.apply(o.cv_seed);
      threads.apply(o.threads);
      o.gates = gates;
      if (study_flags.config.option->count()) {
        lspce::merge_config(o, nlohmann::json::parse(lspce::read_text_file(study_flags.config.value)));
      }
      lspce::cmd_study(o, std::cerr);
    } else if (*eval) {
      std::optional<std::string> out;
      if (eval_out_opt->count()) out = eval_out;
      lspce::cmd_eval(model_file, points_file, out, std::cout);
    } else if (*post) {
      std::optional<std::string> out;
      if (post_out_opt->count()) out = post_out;
      lspce::cmd_postproc(post_model, out, std::cout);
    }
  } catch (const lspce::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
