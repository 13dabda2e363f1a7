#pragma once

#include <filesystem>
#include <memory>

#include "treeblend/bridge.hpp"
#include "treeblend/config.hpp"

namespace treeblend {

class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& message)
        : std::runtime_error("stage " + stage + " failed: " + message), stage(stage) {}
    const std::string stage;
};

struct PipelineSummary {
    std::filesystem::path out_dir;
    std::vector<std::string> stages_run;
    std::vector<std::string> stages_skipped;  // found complete on disk
    std::size_t tree_count = 0;
    std::size_t candidate_count = 0;
    std::size_t ranked_count = 0;
    std::size_t selected_count = 0;
    std::size_t recipe_count = 0;
    std::vector<std::string> warnings;
};

// Stages run in order: pairs, seeds, trees, candidates, ranked, selected,
// recipes. Each leaves its files plus a <stage>.done marker under out_dir; a
// rerun loads marked stages from disk instead of recomputing them, so a
// failed run resumes where it stopped. Randomness flows from [run] seed
// through derive_seed(seed, stage_name, item_index) only. The transport
// argument overrides the HTTP client in live and record modes; replay never
// touches one.
PipelineSummary run_pipeline(const Config& config,
                             std::shared_ptr<Transport> transport = nullptr);

PipelineSummary run_pipeline_file(const std::string& config_path,
                                  std::shared_ptr<Transport> transport = nullptr);

}  // namespace treeblend
