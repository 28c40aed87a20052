#include "opttopo/system_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace opttopo {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    (void)ec;
    return std::string(buffer, ptr);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::FileIo, "cannot open '" + path + "'");
    }
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::FileIo, "cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw Error(ErrorCode::FileIo, "write to '" + path + "' failed");
    }
}

/// Splits off the magic first line and checks it against `expected`
/// ("#opttopo-<kind> v<version>"); returns the document body.
std::string check_magic(const std::string& text, const std::string& expected,
                        const std::string& what) {
    const auto newline = text.find('\n');
    const std::string first = newline == std::string::npos ? text : text.substr(0, newline);
    if (first != expected) {
        const auto space = expected.rfind(' ');
        const std::string prefix = expected.substr(0, space);
        if (first.rfind(prefix, 0) == 0) {
            throw Error(ErrorCode::VersionMismatch,
                        what + " has version '" + first + "', expected '" + expected + "'");
        }
        throw Error(ErrorCode::ParseError,
                    what + " does not start with '" + expected + "'");
    }
    return newline == std::string::npos ? std::string() : text.substr(newline + 1);
}

json parse_body(const std::string& body, const std::string& what) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) {
        throw Error(ErrorCode::ParseError, what + " is not valid JSON");
    }
    return j;
}

json system_to_json(const SystemGraph& g) {
    json j;
    j["dimensions"] = json::array();
    for (const Dimension& dim : g.dimensions.all()) {
        j["dimensions"].push_back({{"name", dim.name},
                                   {"kind", dimension_kind_name(dim.kind)},
                                   {"unit", dim.unit},
                                   {"lo", dim.interval.lo},
                                   {"hi", dim.interval.hi}});
    }
    j["models"] = json::array();
    for (const SubsystemNode& node : g.nodes) {
        json terms = json::object();
        for (std::size_t o = 0; o < node.model.outputs.size(); ++o) {
            json list = json::array();
            for (const PolynomialTerm& term : node.model.terms[o]) {
                list.push_back({term.coefficient, term.exponents});
            }
            terms[node.model.outputs[o]] = std::move(list);
        }
        j["models"].push_back({{"node", node.name},
                               {"inputs", node.model.inputs},
                               {"outputs", node.model.outputs},
                               {"max_degree", node.model.max_degree},
                               {"terms", std::move(terms)}});
    }
    j["edges"] = json::array();
    for (const FlowEdge& edge : g.edges) {
        j["edges"].push_back({{"from", edge.from},
                              {"to", edge.to},
                              {"dimension", edge.dimension},
                              {"step_size", edge.step_size}});
    }
    j["root_weights"] = g.root_weights;
    j["sink"] = {{"node", g.sink.node},
                 {"dimension", g.sink.dimension},
                 {"step_size", g.sink.step_size}};
    j["external_defaults"] = g.external_defaults;
    return j;
}

template <typename T>
T get_field(const json& j, const char* field, const std::string& where) {
    auto it = j.find(field);
    if (it == j.end()) {
        throw Error(ErrorCode::ParseError, where + " lacks field '" + field + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ParseError, where + " field '" + field + "' has a wrong type");
    }
}

SystemGraph system_from_json(const json& j) {
    SystemGraph g;
    for (const json& d : get_field<json>(j, "dimensions", "system")) {
        Dimension dim;
        dim.name = get_field<std::string>(d, "name", "dimension");
        dim.kind = dimension_kind_from_name(get_field<std::string>(d, "kind", "dimension"));
        dim.unit = get_field<std::string>(d, "unit", "dimension");
        dim.interval.lo = get_field<double>(d, "lo", "dimension");
        dim.interval.hi = get_field<double>(d, "hi", "dimension");
        g.dimensions.add(std::move(dim));
    }
    for (const json& m : get_field<json>(j, "models", "system")) {
        SubsystemNode node;
        node.name = get_field<std::string>(m, "node", "model");
        node.model.inputs = get_field<std::vector<std::string>>(m, "inputs", node.name);
        node.model.outputs = get_field<std::vector<std::string>>(m, "outputs", node.name);
        node.model.max_degree = get_field<int>(m, "max_degree", node.name);
        const json& terms = get_field<json>(m, "terms", node.name);
        node.model.terms.resize(node.model.outputs.size());
        for (std::size_t o = 0; o < node.model.outputs.size(); ++o) {
            auto it = terms.find(node.model.outputs[o]);
            if (it == terms.end()) {
                throw Error(ErrorCode::ParseError, "model of '" + node.name +
                                                       "' lacks terms for output '" +
                                                       node.model.outputs[o] + "'");
            }
            for (const json& t : *it) {
                if (!t.is_array() || t.size() != 2) {
                    throw Error(ErrorCode::ParseError,
                                "bad term in model of '" + node.name + "'");
                }
                PolynomialTerm term;
                try {
                    term.coefficient = t[0].get<double>();
                    term.exponents = t[1].get<std::vector<int>>();
                } catch (const json::exception&) {
                    throw Error(ErrorCode::ParseError,
                                "bad term in model of '" + node.name + "'");
                }
                node.model.terms[o].push_back(std::move(term));
            }
        }
        g.nodes.push_back(std::move(node));
    }
    for (const json& e : get_field<json>(j, "edges", "system")) {
        FlowEdge edge;
        edge.from = get_field<std::string>(e, "from", "edge");
        edge.to = get_field<std::string>(e, "to", "edge");
        edge.dimension = get_field<std::string>(e, "dimension", "edge");
        edge.step_size = get_field<double>(e, "step_size", "edge");
        g.edges.push_back(std::move(edge));
    }
    g.root_weights =
        get_field<std::map<std::string, double>>(j, "root_weights", "system");
    const json& sink = get_field<json>(j, "sink", "system");
    g.sink.node = get_field<std::string>(sink, "node", "sink");
    g.sink.dimension = get_field<std::string>(sink, "dimension", "sink");
    g.sink.step_size = get_field<double>(sink, "step_size", "sink");
    if (j.contains("external_defaults")) {
        g.external_defaults =
            get_field<std::map<std::string, double>>(j, "external_defaults", "system");
    }
    derive_roles(g);
    g.finalize();
    return g;
}

json key_to_json(const SystemGraph& g, const TableKey& key) {
    json coupling = json::array();
    for (const auto& [id, idx] : key.coupling) {
        coupling.push_back({g.dimensions.get(id).name, idx});
    }
    return {{"benefit", key.benefit_index}, {"coupling", std::move(coupling)}};
}

TableKey key_from_json(const SystemGraph& g, const json& j) {
    TableKey key;
    key.benefit_index = get_field<int>(j, "benefit", "table key");
    for (const json& c : get_field<json>(j, "coupling", "table key")) {
        key.coupling.emplace_back(g.dimensions.id(c.at(0).get<std::string>()),
                                  c.at(1).get<int>());
    }
    return key;
}

json entry_to_json(const SystemGraph& g, const SolutionEntry& entry) {
    json preds = json::array();
    for (const PredRef& ref : entry.predecessors) {
        preds.push_back(
            {{"node", g.nodes[ref.node].name}, {"key", key_to_json(g, ref.key)}});
    }
    return {{"free", entry.free_levels},
            {"coupling", entry.coupling_levels},
            {"benefit_value", entry.benefit_value},
            {"benefit_index", entry.benefit_index},
            {"local_effort", entry.local_root_effort},
            {"cumulative_effort", entry.cumulative_root_effort},
            {"outputs", entry.local_outputs},
            {"predecessors", std::move(preds)}};
}

SolutionEntry entry_from_json(const SystemGraph& g, const json& j) {
    SolutionEntry entry;
    entry.free_levels = get_field<std::vector<int>>(j, "free", "entry");
    entry.coupling_levels = get_field<std::vector<int>>(j, "coupling", "entry");
    entry.benefit_value = get_field<double>(j, "benefit_value", "entry");
    entry.benefit_index = get_field<int>(j, "benefit_index", "entry");
    entry.local_root_effort = get_field<double>(j, "local_effort", "entry");
    entry.cumulative_root_effort = get_field<double>(j, "cumulative_effort", "entry");
    entry.local_outputs =
        get_field<std::map<std::string, double>>(j, "outputs", "entry");
    for (const json& p : get_field<json>(j, "predecessors", "entry")) {
        PredRef ref;
        ref.node = static_cast<std::uint32_t>(
            g.node_index(get_field<std::string>(p, "node", "predecessor")));
        ref.key = key_from_json(g, get_field<json>(p, "key", "predecessor"));
        entry.predecessors.push_back(std::move(ref));
    }
    return entry;
}

json table_to_json(const SystemGraph& g, const NodeTable& table) {
    // Keys are written in sorted order so dumps are reproducible.
    std::vector<const TableKey*> keys;
    keys.reserve(table.entries.size());
    for (const auto& [key, _] : table.entries) keys.push_back(&key);
    std::sort(keys.begin(), keys.end(),
              [](const TableKey* a, const TableKey* b) { return *a < *b; });
    json rows = json::array();
    for (const TableKey* key : keys) {
        json entries = json::array();
        for (const SolutionEntry& entry : table.entries.at(*key)) {
            entries.push_back(entry_to_json(g, entry));
        }
        rows.push_back({{"key", key_to_json(g, *key)}, {"entries", std::move(entries)}});
    }
    return {{"node", table.node}, {"rows", std::move(rows)}};
}

NodeTable table_from_json(const SystemGraph& g, const json& j) {
    NodeTable table;
    table.node = get_field<std::string>(j, "node", "table");
    for (const json& row : get_field<json>(j, "rows", "table")) {
        TableKey key = key_from_json(g, get_field<json>(row, "key", "table row"));
        std::vector<SolutionEntry> entries;
        for (const json& e : get_field<json>(row, "entries", "table row")) {
            entries.push_back(entry_from_json(g, e));
        }
        table.entries.emplace(std::move(key), std::move(entries));
    }
    return table;
}

json grid_to_json(const Grid& grid) {
    return {{"dimension", grid.dimension},
            {"kind", grid.kind == GridKind::Parameter ? "parameter" : "flow"},
            {"step_count", grid.step_count},
            {"step_size", grid.step_size},
            {"levels", grid.levels}};
}

Grid grid_from_json(const json& j) {
    Grid grid;
    grid.dimension = get_field<std::string>(j, "dimension", "grid");
    grid.kind = get_field<std::string>(j, "kind", "grid") == "flow" ? GridKind::Flow
                                                                    : GridKind::Parameter;
    grid.step_count = get_field<int>(j, "step_count", "grid");
    grid.step_size = get_field<double>(j, "step_size", "grid");
    grid.levels = get_field<std::vector<double>>(j, "levels", "grid");
    return grid;
}

} // namespace

std::string serialize_system(const SystemGraph& g) {
    return std::string(kSystemMagic) + "\n" + system_to_json(g).dump(2) + "\n";
}

SystemGraph parse_system(const std::string& text) {
    const std::string body = check_magic(text, kSystemMagic, "system document");
    return system_from_json(parse_body(body, "system document"));
}

SystemGraph load_system(const std::string& path) {
    return parse_system(read_file(path));
}

void save_system(const SystemGraph& g, const std::string& path) {
    write_file(path, serialize_system(g));
}

std::string serialize_solved(const SolvedSystem& s) {
    json j;
    j["system"] = system_to_json(s.graph);
    j["settings"] = {{"param_steps", s.settings.param_steps},
                     {"param_steps_override", s.settings.param_steps_override},
                     {"tie_tolerance", s.settings.tie_tolerance}};
    if (s.settings.flow_step_override) {
        j["settings"]["flow_step_override"] = *s.settings.flow_step_override;
    }
    j["external_values"] = s.external_values;
    j["grids"] = json::array();
    for (const auto& [name, grid] : s.grids) {
        j["grids"].push_back(grid_to_json(grid));
    }
    j["eval_count"] = s.eval_count;
    j["wall_seconds"] = s.wall_seconds;
    j["tables"] = json::array();
    for (const NodeTable& table : s.tables) {
        j["tables"].push_back(table_to_json(s.graph, table));
    }
    j["sink_table"] = table_to_json(s.graph, s.sink_table);
    return std::string(kTableMagic) + "\n" + j.dump() + "\n";
}

SolvedSystem parse_solved(const std::string& text) {
    const std::string body = check_magic(text, kTableMagic, "table dump");
    const json j = parse_body(body, "table dump");

    SolvedSystem s;
    s.graph = system_from_json(get_field<json>(j, "system", "table dump"));
    const json& settings = get_field<json>(j, "settings", "table dump");
    s.settings.param_steps = get_field<int>(settings, "param_steps", "settings");
    s.settings.param_steps_override =
        get_field<std::map<std::string, int>>(settings, "param_steps_override", "settings");
    s.settings.tie_tolerance = get_field<double>(settings, "tie_tolerance", "settings");
    if (settings.contains("flow_step_override")) {
        s.settings.flow_step_override = settings["flow_step_override"].get<double>();
    }
    s.external_values =
        get_field<std::map<std::string, double>>(j, "external_values", "table dump");
    for (const json& grid : get_field<json>(j, "grids", "table dump")) {
        Grid g = grid_from_json(grid);
        s.grids.emplace(g.dimension, std::move(g));
    }
    s.eval_count = get_field<std::uint64_t>(j, "eval_count", "table dump");
    s.wall_seconds = get_field<double>(j, "wall_seconds", "table dump");
    const json& tables = get_field<json>(j, "tables", "table dump");
    if (tables.size() != s.graph.nodes.size()) {
        throw Error(ErrorCode::ParseError, "table dump has a wrong table count");
    }
    s.tables.resize(s.graph.nodes.size());
    for (const json& t : tables) {
        NodeTable table = table_from_json(s.graph, t);
        const std::size_t idx = s.graph.node_index(table.node);
        s.tables[idx] = std::move(table);
    }
    s.sink_table = table_from_json(s.graph, get_field<json>(j, "sink_table", "table dump"));
    return s;
}

SolvedSystem load_solved(const std::string& path) {
    return parse_solved(read_file(path));
}

void save_solved(const SolvedSystem& s, const std::string& path) {
    write_file(path, serialize_solved(s));
}

namespace {

char detect_delimiter(const std::string& header) {
    for (char candidate : {',', ';', '\t'}) {
        if (header.find(candidate) != std::string::npos) return candidate;
    }
    return ' ';
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string current;
    auto push = [&] {
        // Trim surrounding blanks; blank fields from repeated spaces drop out.
        std::size_t b = current.find_first_not_of(" \t\r");
        std::size_t e = current.find_last_not_of(" \t\r");
        if (b != std::string::npos) {
            fields.push_back(current.substr(b, e - b + 1));
        } else if (delim != ' ') {
            fields.push_back("");
        }
        current.clear();
    };
    for (char c : line) {
        if (c == delim || (delim == ' ' && c == '\t')) {
            push();
        } else {
            current += c;
        }
    }
    push();
    return fields;
}

} // namespace

Dataset parse_dataset(const std::string& text, const std::string& provenance) {
    Dataset data;
    data.provenance = provenance;
    std::istringstream in(text);
    std::string line;
    char delim = ',';
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!header_seen) {
            delim = detect_delimiter(line);
            data.columns = split_fields(line, delim);
            if (data.columns.empty()) {
                throw Error(ErrorCode::ParseError, "dataset header row is empty");
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split_fields(line, delim);
        if (fields.size() != data.columns.size()) {
            throw Error(ErrorCode::ParseError,
                        "dataset line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(data.columns.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        bool finite = true;
        for (const std::string& field : fields) {
            double value = 0.0;
            const char* begin = field.data();
            const char* end = begin + field.size();
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr != end) {
                // from_chars also rejects "nan"/"inf"; treat those as
                // non-finite rather than malformed.
                try {
                    std::size_t used = 0;
                    value = std::stod(field, &used);
                    if (used != field.size()) throw std::invalid_argument(field);
                } catch (const std::exception&) {
                    throw Error(ErrorCode::ParseError, "dataset line " + std::to_string(line_no) +
                                                           ": bad number '" + field + "'");
                }
            }
            if (!std::isfinite(value)) finite = false;
            row.push_back(value);
        }
        if (!finite) {
            ++data.dropped_rows;
            continue;
        }
        data.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw Error(ErrorCode::ParseError, "dataset has no header row");
    }
    return data;
}

std::string serialize_dataset(const Dataset& data) {
    std::ostringstream oss;
    oss << "# opttopo dataset\n";
    if (!data.provenance.empty()) {
        oss << "# provenance: " << data.provenance << "\n";
    }
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (c) oss << ",";
        oss << data.columns[c];
    }
    oss << "\n";
    for (const auto& row : data.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) oss << ",";
            oss << format_double(row[c]);
        }
        oss << "\n";
    }
    return oss.str();
}

Dataset load_dataset(const std::string& path) {
    return parse_dataset(read_file(path), path);
}

void save_dataset(const Dataset& data, const std::string& path) {
    write_file(path, serialize_dataset(data));
}

} // namespace opttopo
