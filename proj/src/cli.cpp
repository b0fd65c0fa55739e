#include "symclust/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "symclust/agglom.hpp"
#include "symclust/diagnostics.hpp"
#include "symclust/dissim.hpp"
#include "symclust/ingest.hpp"
#include "symclust/leaders.hpp"

namespace symclust {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Config-file problems exit with the usage code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[36];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt10(double v) {
    char buf[28];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct ClusterConfig {
    std::string schema_path;
    std::string units_path;
    std::string microdata_path;
    std::optional<std::string> weight_column;
    DissimKind kind = DissimKind::delta1;
    bool run_leaders = true;
    bool run_agglom = true;
    LeadersConfig leaders;
    std::string output_dir;
    // schema overrides
    std::optional<WeightScheme> weight_scheme;
    std::optional<std::vector<double>> alphas;
};

ClusterConfig parse_cluster_config(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const std::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    static const std::set<std::string> known = {
        "schema", "units", "microdata", "weight_column", "delta",  "stages",
        "k",      "restarts", "seed",   "max_iter",      "init",   "tol",
        "output_dir", "weight_scheme", "alphas"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key)) throw ConfigError("config " + path + ": unknown key '" + key + "'");

    ClusterConfig cfg;
    try {
        cfg.schema_path = doc.at("schema").get<std::string>();
        cfg.output_dir = doc.at("output_dir").get<std::string>();
        if (doc.contains("units")) cfg.units_path = doc["units"].get<std::string>();
        if (doc.contains("microdata")) cfg.microdata_path = doc["microdata"].get<std::string>();
        if (doc.contains("weight_column"))
            cfg.weight_column = doc["weight_column"].get<std::string>();
        cfg.kind = parse_dissim_kind(doc.value("delta", std::string("d1")));
        if (doc.contains("stages")) {
            cfg.run_leaders = false;
            cfg.run_agglom = false;
            for (const json& s : doc["stages"]) {
                const std::string stage = s.get<std::string>();
                if (stage == "leaders")
                    cfg.run_leaders = true;
                else if (stage == "agglom")
                    cfg.run_agglom = true;
                else
                    throw ConfigError("config " + path + ": unknown stage '" + stage + "'");
            }
        }
        cfg.leaders.k = doc.value("k", 2);
        cfg.leaders.restarts = doc.value("restarts", 1);
        cfg.leaders.seed = doc.value("seed", std::uint64_t{0});
        cfg.leaders.max_iter = doc.value("max_iter", 100);
        cfg.leaders.tol = doc.value("tol", 0.0);
        cfg.leaders.init =
            parse_init_method(doc.value("init", std::string("random-units-as-leaders")));
        if (doc.contains("weight_scheme"))
            cfg.weight_scheme = parse_weight_scheme(doc["weight_scheme"].get<std::string>());
        if (doc.contains("alphas"))
            cfg.alphas = doc["alphas"].get<std::vector<double>>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    if (cfg.units_path.empty() == cfg.microdata_path.empty())
        throw ConfigError("config " + path + ": exactly one of 'units'/'microdata' required");
    if (!cfg.run_leaders && !cfg.run_agglom)
        throw ConfigError("config " + path + ": stages selects nothing to run");
    return cfg;
}

void append_matrix(std::string& out, const char* name,
                   const std::vector<std::vector<double>>& rows, bool trailing_comma) {
    out += '"';
    out += name;
    out += "\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) out += ',';
        out += '[';
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (j) out += ',';
            out += fmt17(rows[i][j]);
        }
        out += ']';
    }
    out += ']';
    if (trailing_comma) out += ',';
}

std::string leaders_file_text(const std::vector<AgglomItem>& items,
                              const std::vector<double>* errors) {
    std::string out;
    for (std::size_t c = 0; c < items.size(); ++c) {
        out += "{\"cluster\":" + std::to_string(c);
        out += ",\"label\":" + json(items[c].label).dump();
        out += ",\"count\":" + std::to_string(items[c].member_count);
        if (errors != nullptr) out += ",\"error\":" + fmt17((*errors)[c]);
        out += ',';
        append_matrix(out, "leader", items[c].leader.t, true);
        out += "\"aggregates\":{";
        append_matrix(out, "w", items[c].aggregates.w, true);
        append_matrix(out, "w_pos", items[c].aggregates.w_pos, true);
        append_matrix(out, "P", items[c].aggregates.P, true);
        append_matrix(out, "Q", items[c].aggregates.Q, true);
        append_matrix(out, "H", items[c].aggregates.H, true);
        append_matrix(out, "G", items[c].aggregates.G, false);
        out += "}}\n";
    }
    return out;
}

std::string merges_file_text(const std::vector<MergeRecord>& merges) {
    std::string out = "left\tright\theight\tnew_id\n";
    for (const MergeRecord& m : merges)
        out += std::to_string(m.left) + '\t' + std::to_string(m.right) + '\t' +
               fmt17(m.height) + '\t' + std::to_string(m.new_node) + '\n';
    return out;
}

std::vector<MergeRecord> parse_merges_file(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::vector<MergeRecord> merges;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header
        }
        std::istringstream fields(line);
        MergeRecord m;
        if (!(fields >> m.left >> m.right >> m.height >> m.new_node))
            throw std::runtime_error("merge file " + path + " line " +
                                     std::to_string(lineno) + ": bad record");
        merges.push_back(m);
    }
    if (merges.empty()) throw std::runtime_error("merge file " + path + ": no merges");
    return merges;
}

std::string assignments_file_text(const std::vector<SymbolicObject>& units,
                                  const std::vector<int>& labels) {
    std::string out = "unit_id\tcluster\n";
    for (std::size_t u = 0; u < units.size(); ++u)
        out += units[u].id + '\t' + std::to_string(labels[u]) + '\n';
    return out;
}

std::map<std::string, int> parse_assignments_file(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::map<std::string, int> out;
    bool first = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("assignments file " + path + " line " +
                                     std::to_string(lineno) + ": expected id<TAB>cluster");
        out[line.substr(0, tab)] = std::stoi(line.substr(tab + 1));
    }
    if (out.empty()) throw std::runtime_error("assignments file " + path + ": empty");
    return out;
}

std::vector<SymbolicObject> load_input_units(const ClusterConfig& cfg, const Schema& schema) {
    if (!cfg.units_path.empty()) return load_units(cfg.units_path, &schema);
    return read_microdata(cfg.microdata_path, schema, cfg.weight_column);
}

int cmd_cluster(const std::string& config_path, bool /*sequential*/) {
    const ClusterConfig cfg = parse_cluster_config(config_path);
    Schema schema = load_schema(cfg.schema_path);
    if (cfg.alphas.has_value()) {
        if (cfg.alphas->size() != schema.size())
            throw ConfigError("config " + config_path + ": alphas needs " +
                              std::to_string(schema.size()) + " entries");
        for (double a : *cfg.alphas)
            if (!(a >= 0.0))
                throw ConfigError("config " + config_path + ": alphas must be >= 0");
        for (std::size_t i = 0; i < schema.size(); ++i)
            schema.variables[i].alpha = (*cfg.alphas)[i];
        schema.alpha_normalized = false;
    }
    if (cfg.weight_scheme.has_value()) {
        if (*cfg.weight_scheme == WeightScheme::custom_column && cfg.microdata_path.empty())
            throw ConfigError("config " + config_path +
                              ": custom-column weights need micro-data input");
        schema.weight_scheme = *cfg.weight_scheme;
    }

    std::vector<SymbolicObject> units = load_input_units(cfg, schema);
    if (units.empty()) throw std::runtime_error("no units in input");
    if (cfg.weight_scheme.has_value() && !cfg.units_path.empty()) {
        // prebuilt units carry materialized weights; rebuild per the override
        for (SymbolicObject& x : units)
            for (std::size_t i = 0; i < x.num_variables(); ++i) {
                const double wv =
                    *cfg.weight_scheme == WeightScheme::ones ? 1.0 : x.count[i];
                for (double& w : x.weight[i]) w = wv;
            }
    }

    fs::create_directories(cfg.output_dir);
    const auto out_path = [&cfg](const char* name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    json report;
    report["delta"] = to_string(cfg.kind);
    report["n_units"] = units.size();

    std::vector<AgglomItem> items;
    std::vector<double> item_errors;
    const std::vector<double>* item_errors_ptr = nullptr;

    if (cfg.run_leaders) {
        LeadersResult res = leaders_run(units, schema, cfg.kind, cfg.leaders);
        write_text(out_path("assignments.tsv"),
                   assignments_file_text(units, res.clustering.labels));
        for (int c = 0; c < res.clustering.k(); ++c) {
            auto members = collect_members(units, res.clustering.labels, c);
            items.push_back(item_from_cluster(members, schema, cfg.kind,
                                              "L" + std::to_string(c)));
        }
        item_errors = res.clustering.cluster_errors;
        item_errors_ptr = &item_errors;

        json jl;
        jl["k"] = cfg.leaders.k;
        jl["restarts_requested"] = cfg.leaders.restarts;
        jl["best_restart"] = res.best_restart;
        jl["total_error"] = res.clustering.total_error;
        jl["trace"] = res.trace;
        jl["restarts"] = json::array();
        for (const RestartSummary& r : res.restarts)
            jl["restarts"].push_back({{"seed", r.seed},
                                      {"total_error", r.total_error},
                                      {"iterations", r.iterations},
                                      {"converged", r.converged}});
        report["leaders"] = std::move(jl);

        const InertiaReport ir = inertia(units, res.clustering, schema, cfg.kind);
        report["inertia"] = {{"kind", to_string(ir.kind)},
                             {"TI", ir.total},
                             {"WI", ir.within},
                             {"BI", ir.between},
                             {"residual", ir.residual}};
        std::cerr << "leaders: best restart " << res.best_restart
                  << " P=" << res.clustering.total_error << "\n";
    } else {
        std::vector<int> identity(units.size());
        for (std::size_t u = 0; u < units.size(); ++u) identity[u] = static_cast<int>(u);
        write_text(out_path("assignments.tsv"), assignments_file_text(units, identity));
        for (const SymbolicObject& x : units)
            items.push_back(item_from_unit(x, schema, cfg.kind));
    }

    write_text(out_path("leaders.jsonl"), leaders_file_text(items, item_errors_ptr));

    if (cfg.run_agglom) {
        if (items.size() < 2)
            throw std::runtime_error("agglomeration needs at least 2 leaves");
        const Dendrogram dg = agglomerate(items, schema, cfg.kind);
        write_text(out_path("merges.tsv"), merges_file_text(dg.merges));
        const GapSuggestion gaps = suggest_k(dg.merges, dg.leaf_count);
        report["agglom"] = {{"leaves", dg.leaf_count},
                            {"merges", dg.merges.size()},
                            {"clamped_negative_heights", dg.clamped_negative_heights},
                            {"negative_beyond_tolerance", dg.negative_beyond_tolerance},
                            {"nonmonotone_merges", dg.nonmonotone_merges},
                            {"suggested_k", gaps.suggested_k},
                            {"largest_gap", gaps.largest_gap}};
        std::cerr << "agglom: " << dg.merges.size() << " merges, suggested k "
                  << gaps.suggested_k << "\n";

        bool all_ones = true;
        for (const SymbolicObject& x : units)
            for (const auto& wv : x.weight)
                for (double w : wv)
                    if (w != 1.0) all_ones = false;
        if (all_ones) {
            const WardSpecialCaseReport wr = ward_special_cases_check(units, schema);
            report["ward_special_case"] = {{"applicable", wr.applicable},
                                           {"pairs_checked", wr.pairs_checked},
                                           {"max_abs_error", wr.max_abs_error}};
        }
    }

    write_text(out_path("report.json"), report.dump(2) + "\n");
    return 0;
}

int cmd_cut(const std::string& tree_path, std::optional<int> k,
            std::optional<double> height, const std::optional<std::string>& assignments_path,
            const std::optional<std::string>& out_path) {
    const std::vector<MergeRecord> merges = parse_merges_file(tree_path);
    const int leaf_count = static_cast<int>(merges.size()) + 1;

    std::vector<int> leaf_labels;
    if (k.has_value())
        leaf_labels = cut_merges(merges, leaf_count, *k);
    else
        leaf_labels = cut_merges_height(merges, leaf_count, *height);

    std::string mapping;
    if (assignments_path.has_value()) {
        mapping = "unit_id\tcluster\n";
        for (const auto& [id, leaf] : parse_assignments_file(*assignments_path)) {
            if (leaf < 0 || leaf >= leaf_count)
                throw std::runtime_error("assignments refer to leaf " + std::to_string(leaf) +
                                         " outside the tree");
            mapping += id + '\t' + std::to_string(leaf_labels[leaf]) + '\n';
        }
    } else {
        mapping = "leaf\tcluster\n";
        for (int l = 0; l < leaf_count; ++l)
            mapping += std::to_string(l) + '\t' + std::to_string(leaf_labels[l]) + '\n';
    }

    const GapSuggestion gaps = suggest_k(merges, leaf_count);
    std::ostringstream summary;
    summary << "leaves\t" << leaf_count << "\n";
    summary << "suggested_k\t" << gaps.suggested_k << "\n";
    summary << "largest_gap\t" << fmt10(gaps.largest_gap) << "\n";
    summary << "heights";
    for (double h : gaps.heights) summary << '\t' << fmt10(h);
    summary << "\n";

    if (out_path.has_value()) {
        write_text(*out_path, mapping);
        std::cout << summary.str();
    } else {
        std::cout << mapping;
        std::cerr << summary.str();
    }
    return 0;
}

// Without a schema the table falls back to positional variable and category
// names derived from the units file.
Schema placeholder_schema(const SymbolicObject& x) {
    Schema schema;
    for (std::size_t i = 0; i < x.num_variables(); ++i) {
        VariableSpec v;
        v.name = "V" + std::to_string(i + 1);
        for (std::size_t j = 0; j < x.freq[i].size(); ++j)
            v.categories.push_back("c" + std::to_string(j + 1));
        schema.variables.push_back(std::move(v));
    }
    return schema;
}

int cmd_profile(const std::string& clustering_path, const std::string& units_path,
                const std::optional<std::string>& schema_path,
                const std::optional<std::string>& out_path) {
    Schema schema;
    std::vector<SymbolicObject> units;
    if (schema_path.has_value()) {
        schema = load_schema(*schema_path);
        units = load_units(units_path, &schema);
    } else {
        units = load_units(units_path, nullptr);
        if (units.empty()) throw std::runtime_error("units file " + units_path + ": empty");
        schema = placeholder_schema(units[0]);
    }
    const std::map<std::string, int> assignment = parse_assignments_file(clustering_path);

    int k = 0;
    std::vector<int> labels(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        auto it = assignment.find(units[u].id);
        if (it == assignment.end())
            throw std::runtime_error("unit " + units[u].id + " missing from clustering");
        if (it->second < 0) throw std::runtime_error("negative cluster for " + units[u].id);
        labels[u] = it->second;
        k = std::max(k, it->second + 1);
    }

    std::string out = "cluster\tsize\tvariable\tn\tcategory\tf\tp\n";
    for (int c = 0; c < k; ++c) {
        auto members = collect_members(units, labels, c);
        if (members.empty())
            throw std::runtime_error("cluster " + std::to_string(c) + " has no units");
        for (std::size_t i = 0; i < schema.size(); ++i) {
            std::vector<double> f(schema.arity(i), 0.0);
            double n = 0.0;
            for (const SymbolicObject* x : members) {
                for (std::size_t j = 0; j < f.size(); ++j) f[j] += x->freq[i][j];
                n += x->count[i];
            }
            for (std::size_t j = 0; j < f.size(); ++j) {
                const double p = n > 0.0 ? f[j] / n : 0.0;
                out += std::to_string(c) + '\t' + std::to_string(members.size()) + '\t' +
                       schema.variables[i].name + '\t' + fmt17(n) + '\t' +
                       schema.variables[i].categories[j] + '\t' + fmt17(f[j]) + '\t' +
                       fmt17(p) + '\n';
            }
        }
    }
    if (out_path.has_value())
        write_text(*out_path, out);
    else
        std::cout << out;
    return 0;
}

int cmd_generate(const std::string& profile_path, std::uint64_t seed,
                 const std::string& out_dir) {
    const SyntheticProfile profile = load_profile(profile_path);
    const SyntheticData data = generate_synthetic(profile, seed);
    fs::create_directories(out_dir);
    save_units(data.units, (fs::path(out_dir) / "units.jsonl").string());
    save_schema(profile.schema, (fs::path(out_dir) / "schema.json").string());
    std::string labels = "unit_id\tgroup\n";
    for (std::size_t u = 0; u < data.units.size(); ++u)
        labels += data.units[u].id + '\t' + std::to_string(data.labels[u]) + '\n';
    write_text((fs::path(out_dir) / "labels.tsv").string(), labels);
    std::cerr << "generated " << data.units.size() << " units in " << profile.groups.size()
              << " groups\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Leaders and generalized Ward clustering for distribution-valued data"};
    app.require_subcommand(1);

    std::string config_path;
    bool sequential = false;
    CLI::App* cluster = app.add_subcommand("cluster", "run the clustering pipeline");
    cluster->add_option("--config", config_path, "JSON config file")->required();
    cluster->add_flag("--sequential", sequential,
                      "force sequential evaluation (the default; kept for scripts)");

    std::string tree_path;
    int cut_k = 0;
    double cut_height = 0.0;
    std::string cut_assignments;
    std::string cut_out;
    CLI::App* cut = app.add_subcommand("cut", "cut a merge tree into a flat clustering");
    cut->add_option("--tree", tree_path, "merges.tsv from the cluster command")->required();
    CLI::Option* optk = cut->add_option("--k", cut_k, "number of clusters");
    CLI::Option* opth = cut->add_option("--height", cut_height, "height threshold");
    optk->excludes(opth);
    std::ignore = cut->add_option("--assignments", cut_assignments,
                                  "unit assignments to compose with the cut");
    cut->add_option("--out", cut_out, "write the mapping here instead of stdout");

    std::string prof_clustering, prof_units, prof_schema, prof_out;
    CLI::App* prof = app.add_subcommand("profile", "per-cluster variable distributions");
    prof->add_option("--clustering", prof_clustering, "assignments file")->required();
    prof->add_option("--units", prof_units, "units file")->required();
    prof->add_option("--schema", prof_schema, "schema file (default: positional names)");
    prof->add_option("--out", prof_out, "output TSV path (default stdout)");

    std::string gen_profile, gen_out = ".";
    std::uint64_t gen_seed = 0;
    CLI::App* gen = app.add_subcommand("generate", "generate synthetic units");
    gen->add_option("--profile", gen_profile, "generator profile JSON")->required();
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out-dir", gen_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cluster->parsed()) return cmd_cluster(config_path, sequential);
        if (cut->parsed()) {
            if ((optk->count() > 0) == (opth->count() > 0)) {
                std::cerr << "cut: exactly one of --k/--height is required\n";
                return 2;
            }
            return cmd_cut(tree_path,
                           optk->count() ? std::optional<int>(cut_k) : std::nullopt,
                           opth->count() ? std::optional<double>(cut_height) : std::nullopt,
                           cut_assignments.empty() ? std::nullopt
                                                   : std::optional<std::string>(cut_assignments),
                           cut_out.empty() ? std::nullopt : std::optional<std::string>(cut_out));
        }
        if (prof->parsed())
            return cmd_profile(prof_clustering, prof_units,
                               prof_schema.empty() ? std::nullopt
                                                   : std::optional<std::string>(prof_schema),
                               prof_out.empty() ? std::nullopt
                                                : std::optional<std::string>(prof_out));
        if (gen->parsed()) return cmd_generate(gen_profile, gen_seed, gen_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace symclust
