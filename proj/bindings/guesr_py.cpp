#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "guesr/corpus.hpp"
#include "guesr/errors.hpp"
#include "guesr/eval.hpp"
#include "guesr/girg.hpp"
#include "guesr/trainer.hpp"
#include "guesr/views.hpp"

namespace py = pybind11;
using namespace guesr;

namespace {

RunConfig config_from_dict(const py::dict& d) {
    RunConfig cfg;
    for (const auto& item : d)
        cfg.set(py::str(item.first).cast<std::string>(), py::str(item.second).cast<std::string>());
    return cfg;
}

py::dict report_to_dict(const RankReport& report) {
    py::dict out;
    out["users_evaluated"] = report.users_evaluated;
    out["users_skipped"] = report.users_skipped;
    out["events"] = int(report.events.size());
    py::dict ks;
    for (int k : report.ks) {
        const MetricPair m = report.at(k);
        py::dict entry;
        entry["recall"] = m.recall;
        entry["ndcg"] = m.ndcg;
        ks[py::str(std::to_string(k))] = entry;
    }
    out["K"] = ks;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GUESR core: item graph construction, contrastive training, full-ranking eval";

    py::register_exception<ConfigError>(m, "GuesrConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "GuesrParseError", PyExc_ValueError);

    py::class_<Corpus>(m, "Corpus")
        .def_property_readonly("user_count", &Corpus::user_count)
        .def_property_readonly("item_count", &Corpus::item_count)
        .def_property_readonly("has_attributes", &Corpus::has_attributes)
        .def("sequence",
             [](const Corpus& c, int user) {
                 if (user < 0 || user >= c.user_count()) throw Error("user id out of range");
                 return c.sequences[size_t(user)];
             })
        .def("summary_json", [](const Corpus& c) { return corpus_summary_json(c); });

    py::class_<WeightedGraph>(m, "ItemGraph")
        .def_property_readonly("item_count", &WeightedGraph::item_count)
        .def_property_readonly("edge_count", &WeightedGraph::edge_count)
        .def("weighted_degree", &WeightedGraph::weighted_degree)
        .def("neighbors",
             [](const WeightedGraph& g, int item) {
                 std::vector<std::tuple<int, double, double>> out;
                 for (const auto& n : g.neighbors(item))
                     out.emplace_back(n.item, n.w_raw, n.w_hat);
                 return out;
             })
        .def("export_edges", &WeightedGraph::export_edges);

    m.def(
        "load_sequences", [](const std::string& path) { return load_sequences(path); },
        py::arg("path"));
    m.def(
        "load_attributes",
        [](Corpus& corpus, const std::string& path) { load_attributes(corpus, path); },
        py::arg("corpus"), py::arg("path"));
    m.def("synth_corpus", &synth_corpus, py::arg("blocks"), py::arg("items_per_block"),
          py::arg("users"), py::arg("seed"));
    m.def("write_corpus", &write_corpus, py::arg("corpus"), py::arg("data_path"),
          py::arg("attributes_path") = std::string());

    m.def(
        "build_girg",
        [](const Corpus& corpus, int n, double epsilon, bool unit_weights, bool train_only) {
            GirgConfig cfg{n, epsilon};
            const EdgeWeightMode mode =
                unit_weights ? EdgeWeightMode::unit : EdgeWeightMode::inverse_interval;
            if (train_only) {
                const Split split = chronological_split(corpus);
                return build_girg(split.train, corpus.item_count(), cfg, mode);
            }
            return build_girg(corpus.sequences, corpus.item_count(), cfg, mode);
        },
        py::arg("corpus"), py::arg("n") = 2, py::arg("epsilon") = 0.0,
        py::arg("unit_weights") = false, py::arg("train_only") = true);

    m.def(
        "sample_view",
        [](const WeightedGraph& graph, int anchor, int depth, uint64_t seed) {
            Rng rng(seed);
            const ViewSample view = sample_view(graph, anchor, depth, rng);
            py::dict out;
            out["anchor"] = view.anchor;
            out["nodes"] = view.nodes;
            out["edges"] = view.edges;
            return out;
        },
        py::arg("graph"), py::arg("anchor"), py::arg("depth"), py::arg("seed"));

    m.def(
        "window",
        [](const std::vector<int>& seq, int m_cap) {
            const Window w = window(seq, m_cap);
            std::vector<bool> valid(w.valid.begin(), w.valid.end());
            return py::make_tuple(w.ids, valid);
        },
        py::arg("sequence"), py::arg("m"));

    m.def("full_rank", &full_rank, py::arg("scores"), py::arg("target"),
          py::arg("excluded") = std::vector<char>());
    m.def(
        "rank_metrics",
        [](const std::vector<int>& ranks, int k) {
            const MetricPair m_ = rank_metrics(ranks, k);
            return py::make_tuple(m_.recall, m_.ndcg);
        },
        py::arg("ranks"), py::arg("k"));

    m.def(
        "train",
        [](const py::dict& config) {
            const RunConfig cfg = config_from_dict(config);
            const TrainResult result = train(cfg);
            py::dict out;
            out["checkpoint"] = result.checkpoint_path;
            out["epochs"] = int(result.epochs.size());
            out["final_loss_total"] = result.epochs.back().loss_total;
            out["final_loss_pred"] = result.epochs.back().loss_pred;
            out["final_loss_cl"] = result.epochs.back().loss_cl;
            return out;
        },
        py::arg("config"));

    m.def(
        "evaluate",
        [](const py::dict& config) { return report_to_dict(evaluate_cmd(config_from_dict(config))); },
        py::arg("config"));

    m.def(
        "ablate",
        [](const py::dict& config, const std::vector<std::string>& variants,
           const std::vector<uint64_t>& seeds, const std::string& workdir) {
            const RunConfig cfg = config_from_dict(config);
            std::vector<Variant> vs;
            for (const auto& v : variants) vs.push_back(parse_variant(v));
            const AblationTable table = ablate(cfg, vs, seeds, workdir);
            py::list rows;
            for (const auto& cell : table.cells) {
                py::dict row;
                row["variant"] = variant_name(cell.variant);
                row["label"] = variant_display(cell.variant);
                row["recall10"] = cell.recall10;
                row["ndcg10"] = cell.ndcg10;
                row["recall20"] = cell.recall20;
                row["ndcg20"] = cell.ndcg20;
                rows.append(row);
            }
            return rows;
        },
        py::arg("config"), py::arg("variants"), py::arg("seeds"), py::arg("workdir") = ".");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
