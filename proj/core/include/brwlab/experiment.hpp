#ifndef BRWLAB_EXPERIMENT_HPP
#define BRWLAB_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "brwlab/config.hpp"

namespace brwlab {

inline constexpr const char* kArtifactName = "brwlab";
inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunOutputs {
    std::vector<std::string> files;  // paths written, manifest last
    std::string manifest_path;
    std::string summary;  // one-paragraph human summary for the CLI
    int exit_code = 0;    // 3 when a run truncated at the population cap
};

// Dispatches the experiment, writes its CSV data files plus a JSON manifest
// into out_dir, and returns the file list.  Identical configs (seed included)
// produce byte-identical CSVs; the manifest differs only in timing fields.
RunOutputs run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Re-runs the experiment recorded in a manifest (resolved config + seed).
RunOutputs rerun_from_manifest(const std::string& manifest_path, const std::string& out_dir);

struct Preset {
    std::string name;
    std::string description;
    std::string config_text;
};

// One preset per headline experiment and per verification, plus exploratory
// presets for the open questions.
const std::vector<Preset>& list_presets();
const Preset& find_preset(const std::string& name);

} // namespace brwlab

#endif
