#ifndef QUNFOLD_IO_HPP
#define QUNFOLD_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "qunfold/bisim.hpp"
#include "qunfold/embedding.hpp"
#include "qunfold/evidence.hpp"
#include "qunfold/kripke.hpp"
#include "qunfold/proximity.hpp"
#include "qunfold/unfolding.hpp"
#include "qunfold/universe.hpp"

namespace qunfold::io {

using Json = nlohmann::ordered_json;

/// Compact JSON text; floating-point numbers use 17 significant digits,
/// non-finite numbers become null. indent < 0 gives a single line.
std::string dump(const Json& j, int indent = -1);

/// Reads a whole file; throws Error naming the path on failure.
std::string read_file(const std::string& path);
/// Writes text to path, or to stdout when path is "-".
void write_file(const std::string& path, const std::string& text);

/// Parses JSON text; errors carry `source` and the byte offset.
Json parse_json(const std::string& text, const std::string& source);
Json load_json(const std::string& path);

// Readers throw Error prefixed with `source` on any schema violation.

/// {"nodes":[...], "edges":[[from,to],...], "root":id, "atoms":[...]}
SeedGraph seed_from_json(const Json& j, const std::string& source = "seed");
Json seed_to_json(const SeedGraph& g);

/// {"worlds":[...], "access":[[w,w'],...], "valuation":{w:[tags]}, "weights":{w:x}}
KripkeModel model_from_json(const Json& j, const std::string& source = "model");
Json model_to_json(const KripkeModel& m);

/// {"carrier":[...], "pairs":[[x,y],...]}
ProximitySpace proximity_from_json(const Json& j, const std::string& source = "proximity");
Json proximity_to_json(const ProximitySpace& s);

/// {"frame":[...], "masses":[{"set":[...], "mass":x},...]}
BPA bpa_from_json(const Json& j, const std::string& source = "bpa");
Json bpa_to_json(const BPA& b);

/// {world key: weight}; the map must cover exactly the given worlds.
std::vector<double> weights_from_json(const Json& j, const std::vector<WorldId>& worlds,
                                      const std::string& source = "weights");

/// Formula text is replaced by its hash when longer than this many bytes.
inline constexpr std::size_t kFormulaTextLimit = 1 << 16;

Json formula_to_json(Formula f);
Json tree_to_json(const StageModel& m);
std::string tree_to_dot(const StageModel& m);
std::string sigma_to_dot(const SigmaModel& s);
Json bisimulation_report_to_json(const BisimulationReport& r, const KripkeModel& g, const KripkeModel& h);
Json bisimulation_to_json(const Bisimulation& b, const KripkeModel& g, const KripkeModel& h);

Json quantum_set_to_json(const ProximitySpace& s, const QuantumSet& q);
Json lattice_to_json(const ProximitySpace& s, const std::vector<QuantumSet>& sets);

/// index,eigenvalue,degenerate
std::string spectrum_csv(const Spectrum& s);
std::string matrix_csv(const Eigen::MatrixXd& m);
/// One 0/1 row per codeword.
std::string codewords_text(const std::vector<Codeword>& words);

/// set,mass,bel,pl for every subset of the frame in bitmask order.
std::string evidence_csv(const BPA& b);

Json record_to_json(const StageRecord& r);
std::string trace_to_jsonl(const RunTrace& t);
Json diagnostics_to_json(const StageState& s);
Json prediction_to_json(const StageState& s, const Prediction& p);
Json explanation_to_json(const StageState& prev, const Explanation& e);

}  // namespace qunfold::io

#endif
