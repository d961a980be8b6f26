#include "cli.hpp"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qunfold/bisim.hpp"
#include "qunfold/embedding.hpp"
#include "qunfold/error.hpp"
#include "qunfold/evidence.hpp"
#include "qunfold/io.hpp"
#include "qunfold/proximity.hpp"
#include "qunfold/unfolding.hpp"
#include "qunfold/universe.hpp"

namespace qunfold::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Settings {
  std::string config;
  std::size_t depth_cap = 12;
  std::size_t node_cap = 1'000'000;
  double eps_degenerate = 1e-8;
  double eps_zero = 1e-12;
  std::string pairing_rule = "positional";
  std::string prior = "uniform";
  std::string prior_file;
};

void add_common(CLI::App* sub, Settings& s) {
  sub->add_option("--config", s.config, "key=value file; command-line flags take precedence");
  sub->add_option("--depth-cap", s.depth_cap, "maximum unfolding depth")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
  sub->add_option("--node-cap", s.node_cap, "maximum unfolding tree size")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  sub->add_option("--eps-degenerate", s.eps_degenerate, "eigenvalue degeneracy tolerance, relative to the spectral radius")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--eps-zero", s.eps_zero, "zero tolerance for inner products")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--pairing-rule", s.pairing_rule, "world/eigenvector pairing")
      ->capture_default_str()
      ->check(CLI::IsMember({"positional", "max-component"}));
  sub->add_option("--prior", s.prior, "prior over the previous basis")
      ->capture_default_str()
      ->check(CLI::IsMember({"uniform", "file"}));
  sub->add_option("--prior-file", s.prior_file, "JSON map from previous-stage world key to prior weight");
}

// Values from the config file fill options absent from the command line.
void apply_config(CLI::App* sub, const Settings& s) {
  if (s.config.empty()) return;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(s.config);
  } catch (const CLI::FileError& e) {
    throw Error(s.config + ": cannot read config file");
  }
  for (const auto& item : items) {
    std::string name = item.name;
    for (char& c : name)
      if (c == '_') c = '-';
    if (name == "config") throw CLI::ConfigError("config files cannot nest");
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr) throw CLI::ConfigError(s.config + ": unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

UniverseConfig universe_config(const Settings& s) {
  UniverseConfig c;
  c.limits.depth_cap = s.depth_cap;
  c.limits.node_cap = s.node_cap;
  c.eps_degenerate = s.eps_degenerate;
  c.eps_zero = s.eps_zero;
  c.pairing = parse_pairing_rule(s.pairing_rule);
  return c;
}

std::string settings_record(const Settings& s) {
  std::ostringstream out;
  out << "depth_cap=" << s.depth_cap << "\n"
      << "node_cap=" << s.node_cap << "\n"
      << "eps_degenerate=" << io::dump(Json(s.eps_degenerate)) << "\n"
      << "eps_zero=" << io::dump(Json(s.eps_zero)) << "\n"
      << "pairing_rule=" << s.pairing_rule << "\n"
      << "prior=" << s.prior << "\n";
  if (!s.prior_file.empty()) out << "prior_file=" << s.prior_file << "\n";
  return out.str();
}

class Sink {
 public:
  explicit Sink(std::ostream& out) : out_(out) {}

  void emit(const std::string& path, const std::string& text) {
    if (path == "-") {
      out_ << text;
      out_.flush();
      return;
    }
    io::write_file(path, text);
  }

 private:
  std::ostream& out_;
};

SeedGraph load_seed(const std::string& path) { return io::seed_from_json(io::load_json(path), path); }

std::optional<std::vector<double>> load_prior(const Settings& s, const StageState& prev) {
  if (s.prior == "uniform") {
    if (!s.prior_file.empty()) throw CLI::ValidationError("--prior-file needs --prior file");
    return std::nullopt;
  }
  if (s.prior_file.empty()) throw CLI::ValidationError("--prior file needs --prior-file");
  std::vector<double> w =
      io::weights_from_json(io::load_json(s.prior_file), prev.stage_model.kripke.worlds(), s.prior_file);
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw Error(s.prior_file + ": prior weights must be non-negative");
    sum += x;
  }
  if (!(sum > 0.0)) throw Error(s.prior_file + ": prior weights sum to zero");
  for (double& x : w) x /= sum;
  return w;
}

void write_stage_artifacts(const fs::path& dir, const StageState& s, const StageState* prev,
                           const Settings& settings) {
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) { io::write_file((dir / name).string(), text); };
  put("tree.dot", io::tree_to_dot(s.stage_model));
  put("tree.json", io::dump(io::tree_to_json(s.stage_model), 2) + "\n");
  put("sigma.dot", io::sigma_to_dot(s.sigma));
  put("spectrum.csv", io::spectrum_csv(s.basis.spectrum));
  Json omega = Json::object();
  for (std::size_t w = 0; w < s.born.size(); ++w) omega[s.stage_model.kripke.world(w)] = s.born[w];
  put("omega.json", io::dump(omega, 2) + "\n");
  put("diagnostics.json", io::dump(io::diagnostics_to_json(s), 2) + "\n");
  put("prediction.json", io::dump(io::prediction_to_json(s, predict(s)), 2) + "\n");
  if (prev != nullptr) {
    Explanation e = explain(*prev, s, load_prior(settings, *prev));
    put("explanation.json", io::dump(io::explanation_to_json(*prev, e), 2) + "\n");
  }
  if (s.alpha > 0) {
    auto words = codewords(s.stage_model.tree.parents());
    put("codewords.txt", io::codewords_text(words));
    put("d2.csv", io::matrix_csv(distance_matrix_d2(words)));
  }
}

StageState stage_at(const SeedGraph& seed, std::size_t alpha, const UniverseConfig& config,
                    std::optional<StageState>* prev = nullptr) {
  StageState s = init_stage0(seed, config);
  for (std::size_t a = 0; a < alpha; ++a) {
    StageState next = advance(s, seed, config);
    if (prev != nullptr && a + 1 == alpha) prev->emplace(std::move(s));
    s = std::move(next);
  }
  return s;
}

std::vector<std::string> split_frame(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (const auto& x : out)
    if (x.empty()) throw CLI::ValidationError("--frame has an empty element");
  return out;
}

std::string modal_evidence_csv(const KripkeModel& m, const std::vector<std::string>& frame) {
  BPA b = bpa_from_model(m, frame);
  ModalEvidence modal(m, frame);
  const std::vector<double> table = bel_table(b);
  const std::size_t full = table.size() - 1;
  auto num = [](double x) { return io::dump(Json(x)); };
  std::string out = "set,mass,bel,pl,mass_modal,bel_modal,pl_modal\n";
  for (std::size_t mask = 0; mask < table.size(); ++mask) {
    Subset s;
    std::string name;
    for (std::size_t i = 0; i < frame.size(); ++i)
      if (mask & (std::size_t{1} << i)) {
        s.push_back(i);
        if (!name.empty()) name += ' ';
        name += frame[i];
      }
    out += "\"{" + name + "}\"," + num(b.mass(s)) + "," + num(table[mask]) + "," + num(1.0 - table[full ^ mask]) +
           "," + num(modal.mass(s)) + "," + num(modal.bel(s)) + "," + num(modal.pl(s)) + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Staged unfolding simulator: seed graphs, bisimilar proximity models, spectra and evidence."};
  app.name("qunfold");
  app.require_subcommand(1);
  Sink sink(out);

  Settings settings;
  std::string seed_path;
  std::size_t alpha = 0;

  auto* unfold_cmd = app.add_subcommand("unfold", "Unfold a seed graph to a given depth");
  std::string unfold_dot, unfold_json, unfold_model;
  unfold_cmd->add_option("--seed", seed_path, "seed graph JSON")->required();
  unfold_cmd->add_option("--alpha", alpha, "unfolding depth")->required();
  unfold_cmd->add_option("--dot", unfold_dot, "write the tree as DOT");
  unfold_cmd->add_option("--json", unfold_json, "write the tree with formula labels as JSON");
  unfold_cmd->add_option("--model", unfold_model, "write the stage Kripke model as JSON");
  add_common(unfold_cmd, settings);

  auto* bisim_cmd = app.add_subcommand("bisim", "Build the proximity model of a stage and verify the pairing, "
                                                "or compute the greatest bisimulation of two models");
  std::string bisim_report = "-", bisim_dot, left_model, right_model;
  bool strict = false;
  bisim_cmd->add_option("--seed", seed_path, "seed graph JSON");
  bisim_cmd->add_option("--alpha", alpha, "unfolding depth")->capture_default_str();
  bisim_cmd->add_option("--left", left_model, "first Kripke model JSON");
  bisim_cmd->add_option("--right", right_model, "second Kripke model JSON");
  bisim_cmd->add_flag("--strict", strict, "require equal valuations instead of the existence clause");
  bisim_cmd->add_option("--report", bisim_report, "JSON report path")->capture_default_str();
  bisim_cmd->add_option("--dot", bisim_dot, "write the proximity model as DOT");
  add_common(bisim_cmd, settings);

  auto* lattice_cmd = app.add_subcommand("lattice", "List every quantum set of a proximity space");
  std::string proximity_path, lattice_out = "-";
  std::size_t max_carrier = 16;
  lattice_cmd->add_option("--proximity", proximity_path, "proximity space JSON");
  lattice_cmd->add_option("--seed", seed_path, "seed graph JSON (uses the stage proximity model)");
  lattice_cmd->add_option("--alpha", alpha, "unfolding depth")->capture_default_str();
  lattice_cmd->add_option("--max-carrier", max_carrier, "largest carrier to enumerate")->capture_default_str();
  lattice_cmd->add_option("--out", lattice_out, "JSON output path")->capture_default_str();
  add_common(lattice_cmd, settings);

  auto* ds_cmd = app.add_subcommand("ds", "Belief, plausibility and mass tables");
  std::string model_path, bpa_path, weights_path, frame_text, ds_report = "-";
  ds_cmd->add_option("--model", model_path, "Kripke model JSON");
  ds_cmd->add_option("--frame", frame_text, "comma-separated frame tags for --model");
  ds_cmd->add_option("--weights", weights_path, "JSON map from world to weight (uniform when absent)");
  ds_cmd->add_option("--bpa", bpa_path, "basic probability assignment JSON");
  ds_cmd->add_option("--report", ds_report, "CSV output path")->capture_default_str();
  add_common(ds_cmd, settings);

  auto* stage_cmd = app.add_subcommand("stage", "Compute one stage and write its artifacts");
  std::string stage_out;
  stage_cmd->add_option("--seed", seed_path, "seed graph JSON")->required();
  stage_cmd->add_option("--alpha", alpha, "stage number")->required();
  stage_cmd->add_option("--out", stage_out, "artifact directory")->required();
  add_common(stage_cmd, settings);

  auto* run_cmd = app.add_subcommand("run", "Run stages 0..k and write the trace as JSONL");
  std::size_t stages = 0;
  std::string run_out = "-", artifacts;
  run_cmd->add_option("--seed", seed_path, "seed graph JSON")->required();
  run_cmd->add_option("--stages", stages, "number of advance steps k")->required();
  run_cmd->add_option("--out", run_out, "JSONL output path")->capture_default_str();
  run_cmd->add_option("--artifacts", artifacts, "directory for per-stage artifacts");
  add_common(run_cmd, settings);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Codewords, distance matrix and eigenpairs of a stage");
  std::string spectrum_csv = "-", d2_path, words_path, vectors_path;
  spectrum_cmd->add_option("--seed", seed_path, "seed graph JSON")->required();
  spectrum_cmd->add_option("--alpha", alpha, "unfolding depth")->required();
  spectrum_cmd->add_option("--csv", spectrum_csv, "spectrum CSV path")->capture_default_str();
  spectrum_cmd->add_option("--d2", d2_path, "distance matrix CSV path");
  spectrum_cmd->add_option("--codewords", words_path, "codeword rows path");
  spectrum_cmd->add_option("--vectors", vectors_path, "eigenvector matrix CSV path (columns)");
  add_common(spectrum_cmd, settings);

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    apply_config(sub, settings);
    const UniverseConfig config = universe_config(settings);

    if (sub == unfold_cmd) {
      SeedGraph seed = load_seed(seed_path);
      StageModel m = unfold(seed, alpha, config.limits);
      if (!unfold_dot.empty()) sink.emit(unfold_dot, io::tree_to_dot(m));
      if (!unfold_json.empty()) sink.emit(unfold_json, io::dump(io::tree_to_json(m), 2) + "\n");
      if (!unfold_model.empty()) sink.emit(unfold_model, io::dump(io::model_to_json(m.kripke), 2) + "\n");
      if (unfold_dot != "-" && unfold_json != "-" && unfold_model != "-") {
        Json sizes = Json::array();
        for (const auto& ch : children_sets(m)) sizes.push_back(ch.size());
        sink.emit("-", io::dump(Json{{"alpha", alpha}, {"z_u", m.z_u}, {"children", sizes}}) + "\n");
      }
    } else if (sub == bisim_cmd) {
      const ValuationClause clause = strict ? ValuationClause::Strict : ValuationClause::Literal;
      const bool models = !left_model.empty() || !right_model.empty();
      if (models == !seed_path.empty())
        throw CLI::ValidationError("bisim needs either --seed or both --left and --right");
      if (models) {
        if (left_model.empty() || right_model.empty())
          throw CLI::ValidationError("bisim needs both --left and --right");
        KripkeModel g = io::model_from_json(io::load_json(left_model), left_model);
        KripkeModel h = io::model_from_json(io::load_json(right_model), right_model);
        Bisimulation b = max_bisimulation(TransitionSystem(g), TransitionSystem(h), clause);
        sink.emit(bisim_report, io::dump(io::bisimulation_to_json(b, g, h), 2) + "\n");
      } else {
        SeedGraph seed = load_seed(seed_path);
        StageModel m = unfold(seed, alpha, config.limits);
        SigmaModel sigma = build_sigma(m);
        BisimulationReport r =
            verify_bijective_bisimulation(TransitionSystem(m.kripke), sigma.plus_system(), sigma.pairing, clause);
        sink.emit(bisim_report, io::dump(io::bisimulation_report_to_json(r, m.kripke, sigma.kripke), 2) + "\n");
        if (!bisim_dot.empty()) sink.emit(bisim_dot, io::sigma_to_dot(sigma));
        if (!r.ok) {
          err << "error: bisimulation check failed with " << r.violations.size() << " violation(s)\n";
          return 1;
        }
      }
    } else if (sub == lattice_cmd) {
      if (proximity_path.empty() == seed_path.empty())
        throw CLI::ValidationError("lattice needs exactly one of --proximity and --seed");
      std::optional<ProximitySpace> space;
      if (!proximity_path.empty()) {
        space.emplace(io::proximity_from_json(io::load_json(proximity_path), proximity_path));
      } else {
        SeedGraph seed = load_seed(seed_path);
        SigmaModel sigma = build_sigma(unfold(seed, alpha, config.limits));
        space.emplace(ProximitySpace::of_model(sigma.kripke));
      }
      auto sets = enumerate_quantum_sets(*space, max_carrier);
      sink.emit(lattice_out, io::dump(io::lattice_to_json(*space, sets), 2) + "\n");
    } else if (sub == ds_cmd) {
      if (model_path.empty() == bpa_path.empty())
        throw CLI::ValidationError("ds needs exactly one of --model and --bpa");
      if (!bpa_path.empty()) {
        if (!frame_text.empty() || !weights_path.empty())
          throw CLI::ValidationError("--frame and --weights apply to --model only");
        BPA b = io::bpa_from_json(io::load_json(bpa_path), bpa_path);
        sink.emit(ds_report, io::evidence_csv(b));
      } else {
        if (frame_text.empty()) throw CLI::ValidationError("--model needs --frame");
        KripkeModel m = io::model_from_json(io::load_json(model_path), model_path);
        if (!weights_path.empty()) {
          m = m.with_weights(io::weights_from_json(io::load_json(weights_path), m.worlds(), weights_path));
        } else if (!m.has_weights()) {
          m = m.with_weights(std::vector<double>(m.size(), 1.0 / static_cast<double>(m.size())));
        }
        sink.emit(ds_report, modal_evidence_csv(m, split_frame(frame_text)));
      }
    } else if (sub == stage_cmd) {
      SeedGraph seed = load_seed(seed_path);
      std::optional<StageState> prev;
      StageState s = stage_at(seed, alpha, config, &prev);
      write_stage_artifacts(stage_out, s, prev ? &*prev : nullptr, settings);
      io::write_file((fs::path(stage_out) / "config.txt").string(), settings_record(settings));
    } else if (sub == run_cmd) {
      SeedGraph seed = load_seed(seed_path);
      std::optional<StageState> prev;
      RunTrace trace = run(seed, stages, config, [&](const StageState& s) {
        if (!artifacts.empty())
          write_stage_artifacts(fs::path(artifacts) / ("stage-" + std::to_string(s.alpha)), s,
                                prev ? &*prev : nullptr, settings);
        if (!artifacts.empty()) prev.emplace(s);
      });
      if (!artifacts.empty()) io::write_file((fs::path(artifacts) / "config.txt").string(), settings_record(settings));
      sink.emit(run_out, io::trace_to_jsonl(trace));
    } else if (sub == spectrum_cmd) {
      SeedGraph seed = load_seed(seed_path);
      StageModel m = unfold(seed, alpha, config.limits);
      auto words = codewords(m.tree.parents());
      Eigen::MatrixXd d2 = distance_matrix_d2(words);
      EighOptions eopt;
      eopt.degeneracy_rel = settings.eps_degenerate;
      Spectrum s = eigh(d2, eopt);
      sink.emit(spectrum_csv, io::spectrum_csv(s));
      if (!d2_path.empty()) sink.emit(d2_path, io::matrix_csv(d2));
      if (!words_path.empty()) sink.emit(words_path, io::codewords_text(words));
      if (!vectors_path.empty()) sink.emit(vectors_path, io::matrix_csv(s.vectors));
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qunfold::cli
