#pragma once

#include "playerval/config.hpp"
#include "playerval/ingest.hpp"
#include "playerval/synth.hpp"

#include <optional>
#include <set>
#include <string>

namespace playerval::cli {

struct LoadedCorpus {
    ingest::JoinResult joined;
    std::set<std::string> top20;
    schema::PositionAliases aliases;
};

LoadedCorpus load_corpus(const RunConfig& cfg);

void cmd_ingest(const RunConfig& cfg);
void cmd_features(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_importance(const RunConfig& cfg);
void cmd_rank(const RunConfig& cfg);
void cmd_synth(const std::string& spec_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed_override);

} // namespace playerval::cli
