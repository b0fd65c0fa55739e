#include "symclust/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "symclust/rng.hpp"

namespace symclust {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    return lines;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

bool is_missing(const std::string& raw) { return raw.empty() || raw == "NA"; }

std::optional<double> parse_number(const std::string& raw) {
    if (is_missing(raw)) return std::nullopt;
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(raw, &used);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (used != raw.size()) return std::nullopt;
    return v;
}

void format_number(std::string& out, double v) {
    char buf[36];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

void format_array(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (j) out += ',';
        format_number(out, values[j]);
    }
    out += ']';
}

}  // namespace

Schema load_schema(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("schema file " + path + ": " + e.what());
    }
    Schema schema;
    try {
        const bool want_normalized = doc.value("alpha_normalized", false);
        schema.weight_scheme = parse_weight_scheme(doc.value("weight_scheme",
                                                             std::string("per-variable-n")));
        for (const json& jv : doc.at("variables")) {
            VariableSpec v;
            v.name = jv.at("name").get<std::string>();
            v.kind = parse_variable_kind(jv.value("kind", std::string("categorical")));
            v.categories = jv.at("categories").get<std::vector<std::string>>();
            if (jv.contains("breaks")) v.breaks = jv["breaks"].get<std::vector<double>>();
            v.na_category = jv.value("na_category", false);
            v.alpha = jv.value("alpha", 1.0);
            v.per_unit = jv.value("per_unit", false);
            v.weight_column = jv.value("weight_column", std::string());
            schema.variables.push_back(std::move(v));
        }
        if (want_normalized) schema.normalize_alphas();
    } catch (const json::exception& e) {
        throw std::runtime_error("schema file " + path + ": " + e.what());
    }
    auto violations = schema.validate();
    if (!violations.empty()) {
        std::string msg = "schema file " + path + " invalid:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::runtime_error(msg);
    }
    return schema;
}

void save_schema(const Schema& schema, const std::string& path) {
    json doc;
    doc["alpha_normalized"] = schema.alpha_normalized;
    doc["weight_scheme"] = to_string(schema.weight_scheme);
    doc["variables"] = json::array();
    for (const VariableSpec& v : schema.variables) {
        json jv;
        jv["name"] = v.name;
        jv["kind"] = to_string(v.kind);
        jv["categories"] = v.categories;
        if (!v.breaks.empty()) jv["breaks"] = v.breaks;
        jv["na_category"] = v.na_category;
        jv["alpha"] = v.alpha;
        if (v.per_unit) jv["per_unit"] = true;
        if (!v.weight_column.empty()) jv["weight_column"] = v.weight_column;
        doc["variables"].push_back(std::move(jv));
    }
    write_file(path, doc.dump(2) + "\n");
}

int categorize(std::optional<double> value, const VariableSpec& spec) {
    if (spec.kind != VariableKind::numeric_binned)
        throw std::invalid_argument("categorize: variable " + spec.name +
                                    " is not numeric-binned");
    if (!value.has_value()) {
        if (!spec.na_category)
            throw std::domain_error("missing value for variable " + spec.name +
                                    " which has no NA category");
        return static_cast<int>(spec.arity()) - 1;
    }
    const double v = *value;
    int idx = static_cast<int>(spec.breaks.size());
    for (std::size_t b = 0; b < spec.breaks.size(); ++b) {
        if (v < spec.breaks[b]) {
            idx = static_cast<int>(b);
            break;
        }
    }
    return idx;
}

SymbolicObject aggregate_unit(const std::string& id, std::span<const MemberRow> rows,
                              const Schema& schema, double unit_weight) {
    if (rows.empty())
        throw std::invalid_argument("unit " + id + ": no member rows");
    if (!(unit_weight > 0.0))
        throw std::invalid_argument("unit " + id + ": unit weight must be positive");

    const std::size_t m = schema.size();
    for (const MemberRow& row : rows)
        if (row.values.size() != m ||
            (schema.weight_scheme == WeightScheme::custom_column &&
             row.custom_weights.size() != m))
            throw std::invalid_argument("unit " + id + ": row shape does not match schema");
    std::vector<std::vector<double>> freq(m);
    std::vector<double> custom(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        const VariableSpec& spec = schema.variables[i];
        freq[i].assign(spec.arity(), 0.0);
        const std::size_t row_count = spec.per_unit ? 1 : rows.size();
        for (std::size_t r = 0; r < row_count; ++r) {
            const std::string& raw = rows[r].values[i];
            int idx;
            if (spec.kind == VariableKind::numeric_binned) {
                idx = categorize(parse_number(raw), spec);
            } else if (is_missing(raw)) {
                if (!spec.na_category)
                    throw std::domain_error("unit " + id + ": missing value for variable " +
                                            spec.name + " which has no NA category");
                idx = static_cast<int>(spec.arity()) - 1;
            } else {
                idx = -1;
                for (std::size_t c = 0; c < spec.categories.size(); ++c)
                    if (spec.categories[c] == raw) idx = static_cast<int>(c);
                if (idx < 0)
                    throw std::domain_error("unit " + id + ": unknown category '" + raw +
                                            "' for variable " + spec.name);
            }
            freq[i][idx] += 1.0;
        }
        for (double& f : freq[i]) f *= unit_weight;
        if (schema.weight_scheme == WeightScheme::custom_column) {
            if (spec.weight_column.empty())
                throw std::invalid_argument("variable " + spec.name +
                                            " has no weight_column under custom-column scheme");
            custom[i] = rows[0].custom_weights[i] * unit_weight;
        }
    }
    return SymbolicObject::from_frequencies(id, std::move(freq), schema.weight_scheme,
                                            &custom);
}

std::vector<SymbolicObject> read_microdata(const std::string& path, const Schema& schema,
                                           const std::optional<std::string>& weight_column) {
    const auto lines = split_lines(read_file(path));
    if (lines.empty()) throw std::runtime_error("micro-data file " + path + " is empty");
    const char delim = lines[0].find('\t') != std::string::npos ? '\t' : ',';
    const auto header = split(lines[0], delim);
    if (header.size() < 2)
        throw std::runtime_error("micro-data file " + path + ": header needs id + variables");

    auto column_of = [&](const std::string& name) {
        for (std::size_t c = 1; c < header.size(); ++c)
            if (header[c] == name) return static_cast<int>(c);
        throw std::runtime_error("micro-data file " + path + ": no column '" + name + "'");
    };
    std::vector<int> var_col(schema.size());
    std::vector<int> custom_col(schema.size(), -1);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        var_col[i] = column_of(schema.variables[i].name);
        if (schema.weight_scheme == WeightScheme::custom_column &&
            !schema.variables[i].weight_column.empty())
            custom_col[i] = column_of(schema.variables[i].weight_column);
    }
    int wcol = -1;
    if (weight_column.has_value()) wcol = column_of(*weight_column);

    std::vector<std::string> order;
    std::map<std::string, std::vector<MemberRow>> rows_by_unit;
    std::map<std::string, double> weight_by_unit;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const auto fields = split(lines[ln], delim);
        if (fields.size() != header.size())
            throw std::runtime_error("micro-data file " + path + " line " +
                                     std::to_string(ln + 1) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        const std::string& id = fields[0];
        MemberRow row;
        row.values.resize(schema.size());
        row.custom_weights.assign(schema.size(), 1.0);
        for (std::size_t i = 0; i < schema.size(); ++i) {
            row.values[i] = fields[var_col[i]];
            if (custom_col[i] >= 0) {
                auto v = parse_number(fields[custom_col[i]]);
                if (!v.has_value())
                    throw std::runtime_error("micro-data file " + path + " line " +
                                             std::to_string(ln + 1) +
                                             ": bad weight value '" +
                                             fields[custom_col[i]] + "'");
                row.custom_weights[i] = *v;
            }
        }
        double uw = 1.0;
        if (wcol >= 0) {
            auto v = parse_number(fields[wcol]);
            if (!v.has_value())
                throw std::runtime_error("micro-data file " + path + " line " +
                                         std::to_string(ln + 1) + ": bad unit weight '" +
                                         fields[wcol] + "'");
            uw = *v;
        }
        auto it = rows_by_unit.find(id);
        if (it == rows_by_unit.end()) {
            order.push_back(id);
            rows_by_unit[id].push_back(std::move(row));
            weight_by_unit[id] = uw;
        } else {
            if (wcol >= 0 && std::fabs(weight_by_unit[id] - uw) > 1e-12)
                throw std::runtime_error("micro-data file " + path + " line " +
                                         std::to_string(ln + 1) + ": unit " + id +
                                         " has inconsistent weights");
            it->second.push_back(std::move(row));
        }
    }

    std::vector<SymbolicObject> units;
    units.reserve(order.size());
    for (const std::string& id : order)
        units.push_back(aggregate_unit(id, rows_by_unit[id], schema, weight_by_unit[id]));
    return units;
}

std::string units_to_string(std::span<const SymbolicObject> units) {
    std::string out;
    for (const SymbolicObject& x : units) {
        out += "{\"id\":";
        out += json(x.id).dump();
        out += ",\"vars\":[";
        for (std::size_t i = 0; i < x.num_variables(); ++i) {
            if (i) out += ',';
            out += "{\"f\":";
            format_array(out, x.freq[i]);
            out += ",\"w\":";
            format_array(out, x.weight[i]);
            out += ",\"n\":";
            format_number(out, x.count[i]);
            out += '}';
        }
        out += "]}\n";
    }
    return out;
}

void save_units(std::span<const SymbolicObject> units, const std::string& path) {
    write_file(path, units_to_string(units));
}

std::vector<SymbolicObject> load_units(const std::string& path, const Schema* schema) {
    const auto lines = split_lines(read_file(path));
    std::vector<SymbolicObject> units;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        json doc;
        try {
            doc = json::parse(lines[ln]);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("units file " + path + " line " +
                                     std::to_string(ln + 1) + ": " + e.what());
        }
        try {
            std::vector<std::vector<double>> freq, weight;
            std::vector<double> count;
            for (const json& jv : doc.at("vars")) {
                freq.push_back(jv.at("f").get<std::vector<double>>());
                weight.push_back(jv.at("w").get<std::vector<double>>());
                count.push_back(jv.at("n").get<double>());
            }
            units.push_back(SymbolicObject::from_parts(doc.at("id").get<std::string>(),
                                                       std::move(freq), std::move(weight),
                                                       std::move(count)));
        } catch (const json::exception& e) {
            throw std::runtime_error("units file " + path + " line " +
                                     std::to_string(ln + 1) + ": " + e.what());
        }
    }
    if (schema != nullptr) {
        for (const SymbolicObject& x : units) {
            auto violations = validate_object(x, *schema);
            if (!violations.empty()) {
                std::string msg = "units file " + path + ": invalid unit " + x.id + ":";
                for (const auto& v : violations) msg += "\n  " + v;
                throw std::runtime_error(msg);
            }
        }
    }
    return units;
}

SyntheticProfile load_profile(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("profile file " + path + ": " + e.what());
    }
    SyntheticProfile profile;
    try {
        profile.schema.weight_scheme =
            parse_weight_scheme(doc.value("weight_scheme", std::string("per-variable-n")));
        for (const json& jv : doc.at("variables")) {
            VariableSpec v;
            v.name = jv.at("name").get<std::string>();
            v.categories = jv.at("categories").get<std::vector<std::string>>();
            v.alpha = jv.value("alpha", 1.0);
            profile.schema.variables.push_back(std::move(v));
        }
        if (doc.contains("rows_per_unit")) {
            profile.rows_min = doc["rows_per_unit"].at(0).get<int>();
            profile.rows_max = doc["rows_per_unit"].at(1).get<int>();
        }
        if (doc.contains("unit_weight_range")) {
            profile.unit_weight_min = doc["unit_weight_range"].at(0).get<double>();
            profile.unit_weight_max = doc["unit_weight_range"].at(1).get<double>();
        }
        for (const json& jg : doc.at("groups")) {
            GroupProfile g;
            g.name = jg.value("name", "g" + std::to_string(profile.groups.size()));
            g.units = jg.at("units").get<int>();
            g.probs = jg.at("probs").get<std::vector<std::vector<double>>>();
            profile.groups.push_back(std::move(g));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("profile file " + path + ": " + e.what());
    }

    // Validation beyond shape: template distributions must be distributions.
    if (profile.schema.weight_scheme == WeightScheme::custom_column)
        throw std::invalid_argument("profile " + path +
                                    ": custom-column weights are not generatable");
    if (profile.groups.empty())
        throw std::invalid_argument("profile " + path + ": no groups");
    if (profile.rows_min < 1 || profile.rows_max < profile.rows_min)
        throw std::invalid_argument("profile " + path + ": bad rows_per_unit range");
    if (!(profile.unit_weight_min > 0.0) ||
        profile.unit_weight_max < profile.unit_weight_min)
        throw std::invalid_argument("profile " + path + ": bad unit_weight_range");
    for (const GroupProfile& g : profile.groups) {
        if (g.units < 1)
            throw std::invalid_argument("profile " + path + ": group " + g.name +
                                        " has no units");
        if (g.probs.size() != profile.schema.size())
            throw std::invalid_argument("profile " + path + ": group " + g.name +
                                        " template count != variable count");
        for (std::size_t i = 0; i < g.probs.size(); ++i) {
            if (g.probs[i].size() != profile.schema.arity(i))
                throw std::invalid_argument("profile " + path + ": group " + g.name +
                                            " template arity mismatch on variable " +
                                            profile.schema.variables[i].name);
            double sum = 0.0;
            for (double p : g.probs[i]) {
                if (p < 0.0)
                    throw std::invalid_argument("profile " + path +
                                                ": negative template probability");
                sum += p;
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("profile " + path + ": group " + g.name +
                                            " template on variable " +
                                            profile.schema.variables[i].name +
                                            " does not sum to 1");
        }
    }
    return profile;
}

SyntheticData generate_synthetic(const SyntheticProfile& profile, std::uint64_t seed) {
    Rng rng(seed);
    SyntheticData data;
    std::size_t total = 0;
    for (const GroupProfile& g : profile.groups) total += static_cast<std::size_t>(g.units);
    data.units.reserve(total);
    data.labels.reserve(total);

    auto draw_category = [&rng](const std::vector<double>& probs) {
        const double r = rng.uniform();
        double acc = 0.0;
        for (std::size_t c = 0; c < probs.size(); ++c) {
            acc += probs[c];
            if (r < acc) return c;
        }
        return probs.size() - 1;  // guard against rounding in the cumulative sum
    };

    std::size_t serial = 0;
    for (std::size_t gi = 0; gi < profile.groups.size(); ++gi) {
        const GroupProfile& g = profile.groups[gi];
        for (int u = 0; u < g.units; ++u, ++serial) {
            const int rows = profile.rows_min +
                             static_cast<int>(rng.below(profile.rows_max - profile.rows_min + 1));
            const double uw = profile.unit_weight_min == profile.unit_weight_max
                                  ? profile.unit_weight_min
                                  : rng.uniform(profile.unit_weight_min, profile.unit_weight_max);
            std::vector<std::vector<double>> freq(profile.schema.size());
            for (std::size_t i = 0; i < profile.schema.size(); ++i) {
                freq[i].assign(profile.schema.arity(i), 0.0);
                for (int r = 0; r < rows; ++r) freq[i][draw_category(g.probs[i])] += 1.0;
                for (double& f : freq[i]) f *= uw;
            }
            char idbuf[16];
            std::snprintf(idbuf, sizeof(idbuf), "u%05zu", serial);
            data.units.push_back(SymbolicObject::from_frequencies(
                idbuf, std::move(freq), profile.schema.weight_scheme, nullptr));
            data.labels.push_back(static_cast<int>(gi));
        }
    }
    return data;
}

}  // namespace symclust
