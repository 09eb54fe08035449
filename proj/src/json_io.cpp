#include "hfl/json_io.hpp"

#include <fstream>
#include <sstream>

namespace hfl {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument(where + ": " + what);
}

}  // namespace

GroupContext group_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) fail("group", "expected an object with a \"type\" field");
    std::string type = j.at("type").get<std::string>();
    if (type == "free") {
        if (!j.contains("m")) fail("group", "free group needs field \"m\"");
        return GroupContext::free_group(j.at("m").get<int>());
    }
    if (type == "finite") {
        for (const char* key : {"order", "table", "generators"})
            if (!j.contains(key)) fail("group", std::string("finite group needs field \"") + key + "\"");
        auto table = j.at("table").get<std::vector<std::vector<int>>>();
        if (static_cast<int>(table.size()) != j.at("order").get<int>())
            fail("group", "\"order\" does not match the table size");
        return GroupContext::finite_group(std::move(table), j.at("generators").get<std::vector<int>>());
    }
    fail("group", "unknown type '" + type + "' (expected \"free\" or \"finite\")");
}

json group_to_json(const GroupContext& ctx) {
    json j;
    if (ctx.is_free()) {
        j["type"] = "free";
        j["m"] = ctx.gens().free_rank();
    } else {
        j["type"] = "finite";
        j["order"] = ctx.order();
        std::vector<std::vector<int>> table;
        std::vector<Element> all = ctx.ball(static_cast<int>(ctx.order()));
        table.resize(ctx.order());
        for (const auto& g : all) {
            table[static_cast<std::size_t>(g.index)].resize(ctx.order());
            for (const auto& h : all)
                table[static_cast<std::size_t>(g.index)][static_cast<std::size_t>(h.index)] = ctx.multiply(g, h).index;
        }
        j["table"] = table;
        std::vector<int> gens;
        for (int t = 0; t < ctx.token_count(); ++t) gens.push_back(ctx.generator(t).index);
        j["generators"] = gens;
    }
    return j;
}

AffineAction action_from_json(const json& j, const GroupContext& ctx) {
    if (!j.is_object()) fail("action", "expected an object");
    for (const char* key : {"dim", "generators"})
        if (!j.contains(key)) fail("action", std::string("missing field \"") + key + "\"");
    const int dim = j.at("dim").get<int>();
    const double C = j.value("C", 1.0);
    const double sigma = j.value("sigma", 0.0);

    std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps(
        static_cast<std::size_t>(ctx.token_count()));
    for (const auto& [name, spec] : j.at("generators").items()) {
        auto token = ctx.gens().token_by_name(name);
        if (!token) fail("action", "unknown generator \"" + name + "\"");
        if (!spec.contains("A") || !spec.contains("b")) fail("action", "generator \"" + name + "\" needs \"A\" and \"b\"");
        auto rows = spec.at("A").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(rows.size()) != dim) fail("action", "matrix \"A\" of \"" + name + "\" has wrong row count");
        Eigen::MatrixXd A(dim, dim);
        for (int r = 0; r < dim; ++r) {
            if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != dim)
                fail("action", "matrix \"A\" of \"" + name + "\" is not square");
            for (int c = 0; c < dim; ++c) A(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        auto bvec = spec.at("b").get<std::vector<double>>();
        if (static_cast<int>(bvec.size()) != dim) fail("action", "vector \"b\" of \"" + name + "\" has wrong size");
        Eigen::VectorXd b(dim);
        for (int r = 0; r < dim; ++r) b(r) = bvec[static_cast<std::size_t>(r)];
        maps[static_cast<std::size_t>(*token)] = std::make_pair(std::move(A), std::move(b));
    }
    AffineAction action = AffineAction::from_generator_maps(ctx.gens(), dim, std::move(maps), C, sigma);
    action.validate_homomorphism(ctx);
    return action;
}

Graph graph_from_edge_list(const std::string& text) {
    std::istringstream is(text);
    std::vector<std::pair<int, int>> edges;
    int max_vertex = -1;
    std::string line;
    int line_number = 0;
    while (std::getline(is, line)) {
        ++line_number;
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u)) continue;  // blank line
        if (!(ls >> v)) fail("graph", "line " + std::to_string(line_number) + " has a single endpoint");
        if (u < 0 || v < 0) fail("graph", "line " + std::to_string(line_number) + " has a negative vertex id");
        edges.push_back({u, v});
        max_vertex = std::max({max_vertex, u, v});
    }
    if (edges.empty()) fail("graph", "edge list is empty");
    return Graph(max_vertex + 1, std::move(edges));
}

std::string graph_to_edge_list(const Graph& g) {
    std::ostringstream os;
    for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
    return os.str();
}

LinkWeights weights_from_json(const json& j) {
    if (!j.is_object() || !j.contains("edges")) fail("weights", "expected an object with an \"edges\" array");
    LinkWeights w;
    for (const auto& entry : j.at("edges")) {
        if (!entry.is_array() || entry.size() != 3) fail("weights", "each edge must be [\"s\",\"t\",w]");
        w.edges.emplace_back(entry[0].get<std::string>(), entry[1].get<std::string>(), entry[2].get<double>());
    }
    return w;
}

json presentation_to_json(const GroupContext& fm, const std::vector<Element>& relators) {
    json j;
    j["type"] = "free";
    j["m"] = fm.gens().free_rank();
    std::vector<std::string> words;
    words.reserve(relators.size());
    for (const auto& r : relators) words.push_back(fm.format(r));
    j["relators"] = words;
    return j;
}

std::vector<Element> relators_from_json(const json& j, const GroupContext& fm) {
    std::vector<Element> relators;
    if (!j.contains("relators")) return relators;
    for (const auto& entry : j.at("relators")) relators.push_back(fm.parse(entry.get<std::string>()));
    return relators;
}

json measure_to_json(const GroupContext& ctx, const WalkMeasure& mu) {
    json j = json::object();
    for (const auto& [g, mass] : mu.mass) j[ctx.format(g)] = mass;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
}

}  // namespace hfl
