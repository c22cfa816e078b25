#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "guesr/errors.hpp"
#include "guesr/trainer.hpp"
#include "guesr/views.hpp"

namespace {

guesr::RunConfig make_config(const std::string& config_path,
                             const std::vector<std::string>& extras) {
    guesr::RunConfig cfg;
    if (!config_path.empty()) cfg = guesr::RunConfig::from_file(config_path);
    // remaining tokens are --key value overrides for any config key
    for (size_t i = 0; i < extras.size(); i += 2) {
        std::string key = extras[i];
        if (key.rfind("--", 0) != 0)
            throw guesr::ConfigError("expected --key value override, got '" + key + "'");
        key = key.substr(2);
        if (i + 1 >= extras.size())
            throw guesr::ConfigError("override --" + key + " is missing a value");
        cfg.set(key, extras[i + 1]);
    }
    return cfg;
}

std::vector<uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<uint64_t> seeds;
    size_t start = 0;
    while (start <= csv.size()) {
        const size_t comma = csv.find(',', start);
        const std::string tok =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return seeds;
}

std::vector<guesr::Variant> parse_variant_list(const std::string& csv) {
    std::vector<guesr::Variant> out;
    size_t start = 0;
    while (start <= csv.size()) {
        const size_t comma = csv.find(',', start);
        const std::string tok =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) out.push_back(guesr::parse_variant(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GUESR: global graph contrastive enhancement for sequential recommendation"};
    app.require_subcommand(1);

    std::string config_path;

    auto* sc_build = app.add_subcommand("build-graph", "Build and export the item graph");
    std::string graph_out = "girg_edges.tsv";
    int dump_anchor = 0;
    uint64_t dump_seed = 1;
    sc_build->add_option("--config", config_path, "key = value config file");
    sc_build->add_option("--out", graph_out, "edge-list output path");
    sc_build->add_option("--dump-view-anchor", dump_anchor,
                         "also print one sampled view around this item id");
    sc_build->add_option("--dump-view-seed", dump_seed, "seed for the dumped view");
    sc_build->allow_extras();

    auto* sc_train = app.add_subcommand("train", "Train a model");
    sc_train->add_option("--config", config_path, "key = value config file");
    sc_train->allow_extras();

    auto* sc_eval = app.add_subcommand("eval", "Evaluate a checkpoint with full ranking");
    sc_eval->add_option("--config", config_path, "key = value config file");
    sc_eval->allow_extras();

    auto* sc_ablate = app.add_subcommand("ablate", "Train and compare model variants");
    std::string variants_csv = "no_gcl,unweighted_graph,random_negatives";
    std::string seeds_csv;
    std::string workdir = ".";
    sc_ablate->add_option("--config", config_path, "key = value config file");
    sc_ablate->add_option("--variants", variants_csv, "comma-separated variant list");
    sc_ablate->add_option("--seeds", seeds_csv, "comma-separated seeds (default: config seed)");
    sc_ablate->add_option("--workdir", workdir, "directory for per-variant checkpoints");
    sc_ablate->allow_extras();

    auto* sc_synth = app.add_subcommand("synth", "Generate a planted-block corpus");
    int blocks = 2, items_per_block = 20, users = 200;
    uint64_t synth_seed = 1;
    std::string synth_out = "synth.tsv", synth_attrs = "synth_attrs.tsv";
    sc_synth->add_option("--blocks", blocks, "number of blocks");
    sc_synth->add_option("--items-per-block", items_per_block, "items per block");
    sc_synth->add_option("--users", users, "number of users");
    sc_synth->add_option("--seed", synth_seed, "generator seed");
    sc_synth->add_option("--out", synth_out, "interactions TSV output");
    sc_synth->add_option("--attributes-out", synth_attrs, "attributes TSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sc_synth->parsed()) {
            const guesr::Corpus corpus =
                guesr::synth_corpus(blocks, items_per_block, users, synth_seed);
            guesr::write_corpus(corpus, synth_out, synth_attrs);
            std::cout << guesr::corpus_summary_json(corpus) << "\n";
            return 0;
        }

        if (sc_build->parsed()) {
            guesr::RunConfig cfg = make_config(config_path, sc_build->remaining());
            const guesr::GraphSummary summary = guesr::build_graph_cmd(cfg, graph_out);
            std::cout << summary.to_json() << "\n";
            if (dump_anchor > 0) {
                const guesr::Corpus corpus = guesr::load_sequences(cfg.data);
                const guesr::Split split = guesr::chronological_split(corpus);
                const auto graph = guesr::build_girg(split.train, corpus.item_count(), cfg.girg);
                guesr::Rng rng(dump_seed);
                const auto view = guesr::sample_view(graph, dump_anchor, cfg.view_depth, rng);
                std::cout << "# view anchor=" << view.anchor << " depth=" << view.depth
                          << " nodes=";
                for (size_t i = 0; i < view.nodes.size(); ++i)
                    std::cout << (i ? "," : "") << view.nodes[i];
                std::cout << "\n";
                for (const auto& [i, j, w] : view.edges)
                    std::cout << i << '\t' << j << '\t' << w << "\n";
            }
            return 0;
        }

        if (sc_train->parsed()) {
            const guesr::RunConfig cfg = make_config(config_path, sc_train->remaining());
            const guesr::TrainResult result = guesr::train(cfg);
            const auto& last = result.epochs.back();
            std::cout << "trained " << result.epochs.size() << " epochs, final loss "
                      << last.loss_total << " (pred " << last.loss_pred << ", cl " << last.loss_cl
                      << ")\ncheckpoint: " << result.checkpoint_path << "\n";
            return 0;
        }

        if (sc_eval->parsed()) {
            const guesr::RunConfig cfg = make_config(config_path, sc_eval->remaining());
            const guesr::RankReport report = guesr::evaluate_cmd(cfg);
            std::cout << report.to_json() << "\n" << report.to_table("GUESR");
            return 0;
        }

        if (sc_ablate->parsed()) {
            const guesr::RunConfig cfg = make_config(config_path, sc_ablate->remaining());
            const std::vector<uint64_t> seeds =
                seeds_csv.empty() ? std::vector<uint64_t>{cfg.seed} : parse_seed_list(seeds_csv);
            const auto table = guesr::ablate(cfg, parse_variant_list(variants_csv), seeds, workdir);
            std::cout << table.to_text() << table.to_json() << "\n";
            return 0;
        }
    } catch (const guesr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const guesr::DivergenceError& e) {
        std::cerr << "numeric divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
