#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grembed/error.hpp"
#include "grembed/pipeline.hpp"

namespace gp = grembed::pipeline;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string method;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_method) {
    cmd->add_option("--config", f.config, "JSON config file");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output directory");
    if (with_method)
        cmd->add_option("--method", f.method, "restrict to one embedding")
            ->check(CLI::IsMember({"node2vec", "spectral", "hope"}));
}

int run_pipeline(gp::Stage stage, const CommonFlags& f) {
    gp::PipelineConfig config = f.config.empty() ? gp::PipelineConfig{} : gp::load_config(f.config);
    if (f.seed) config.seed = *f.seed;
    if (!f.out.empty()) config.out_dir = f.out;
    gp::RunOptions opts;
    opts.log = &std::cout;
    if (!f.method.empty()) opts.method = grembed::parse_method(f.method);
    gp::run_stage(stage, config, opts);
    return 0;
}

int run_synth(const CommonFlags& f) {
    gp::SyntheticSpec spec;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw grembed::MissingArtifactError(f.config);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw grembed::ValidationError("synthetic spec " + f.config + ": " + e.what());
        }
        spec = gp::synthetic_from_json(j);
    }
    if (f.seed) spec.seed = *f.seed;
    const auto files = gp::generate_synthetic(spec, f.out.empty() ? "fixture" : f.out);
    std::cout << "wrote " << files.reviews.string() << ", " << files.friends.string() << ", "
              << files.communities.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social-graph embedding restaurant recommender"};
    app.require_subcommand(1);
    CommonFlags flags;
    for (const char* name : {"ingest", "graph", "embed", "cluster", "recommend", "hybrid", "evaluate", "all"}) {
        const std::string help = std::string(name) == "all" ? "run every stage in order" : "run the " + std::string(name) + " stage";
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, flags, true);
    }
    auto* synth = app.add_subcommand("synth", "write a planted-community fixture");
    add_common(synth, flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto* cmd = app.get_subcommands().front();
        if (cmd->get_name() == "synth") return run_synth(flags);
        return run_pipeline(gp::parse_stage(cmd->get_name()), flags);
    } catch (const grembed::MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const grembed::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const grembed::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
