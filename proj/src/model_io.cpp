#include <set>
#include <sstream>

#include "json.hpp"
#include "wrist/gbdt.hpp"

namespace wrist {

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "wrist-gbdt";

using json = nlohmann::json;

void write_node(std::ostream& out, const Tree& t, int i) {
    const auto& n = t.nodes[i];
    if (n.is_leaf()) {
        out << "{\"leaf\":" << format_double(n.weight) << '}';
        return;
    }
    out << "{\"feature\":" << n.feature << ",\"threshold\":" << format_double(n.threshold) << ",\"left\":";
    write_node(out, t, n.left);
    out << ",\"right\":";
    write_node(out, t, n.right);
    out << '}';
}

std::string quoted(const std::string& s) { return json(s).dump(); }

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ModelLoadError("model load error at " + where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) fail(where + "/" + key, "unknown field");
}

const json& need(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

double need_number(const json& obj, const std::string& where, const char* key) {
    const auto& v = need(obj, where, key);
    if (!v.is_number()) fail(where + "/" + key, "expected a number");
    return v.get<double>();
}

long long need_int(const json& obj, const std::string& where, const char* key) {
    const auto& v = need(obj, where, key);
    if (!v.is_number_integer()) fail(where + "/" + key, "expected an integer");
    return v.get<long long>();
}

int read_node(const json& j, const std::string& where, Tree& t, std::size_t n_features, int depth) {
    if (depth > 64) fail(where, "tree too deep");
    if (!j.is_object()) fail(where, "expected a node object");
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.contains("leaf")) {
        only_keys(j, where, {"leaf"});
        t.nodes[id].weight = need_number(j, where, "leaf");
        return id;
    }
    only_keys(j, where, {"feature", "threshold", "left", "right"});
    long long f = need_int(j, where, "feature");
    if (f < 0 || static_cast<std::size_t>(f) >= n_features) fail(where + "/feature", "index out of range");
    double thr = need_number(j, where, "threshold");
    int l = read_node(need(j, where, "left"), where + "/left", t, n_features, depth + 1);
    int r = read_node(need(j, where, "right"), where + "/right", t, n_features, depth + 1);
    auto& node = t.nodes[id];
    node.feature = static_cast<int>(f);
    node.threshold = thr;
    node.left = l;
    node.right = r;
    return id;
}

TrainConfig read_config(const json& cfg, const std::string& where) {
    only_keys(cfg, where,
              {"n_estimators", "learning_rate", "max_depth", "tree_algorithm", "lambda", "n_bins",
               "min_child_weight", "seed"});
    TrainConfig c;
    c.n_estimators = static_cast<int>(need_int(cfg, where, "n_estimators"));
    c.learning_rate = need_number(cfg, where, "learning_rate");
    c.max_depth = static_cast<int>(need_int(cfg, where, "max_depth"));
    const auto& algo = need(cfg, where, "tree_algorithm");
    if (!algo.is_string()) fail(where + "/tree_algorithm", "expected a string");
    try {
        c.tree_algorithm = parse_tree_algorithm(algo.get<std::string>());
    } catch (const DomainError& e) {
        fail(where + "/tree_algorithm", e.what());
    }
    c.lambda = need_number(cfg, where, "lambda");
    c.n_bins = static_cast<int>(need_int(cfg, where, "n_bins"));
    c.min_child_weight = need_number(cfg, where, "min_child_weight");
    const auto& seed = need(cfg, where, "seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail(where + "/seed", "expected an integer");
    c.seed = seed.get<std::uint64_t>();
    return c;
}

}  // namespace

std::string config_to_json(const TrainConfig& c) {
    std::ostringstream out;
    out << "{\"n_estimators\":" << c.n_estimators << ",\"learning_rate\":" << format_double(c.learning_rate)
        << ",\"max_depth\":" << c.max_depth << ",\"tree_algorithm\":\"" << to_string(c.tree_algorithm)
        << "\",\"lambda\":" << format_double(c.lambda) << ",\"n_bins\":" << c.n_bins
        << ",\"min_child_weight\":" << format_double(c.min_child_weight) << ",\"seed\":" << c.seed << "}";
    return out.str();
}

TrainConfig config_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ModelLoadError("config parse error at byte " + std::to_string(e.byte) + ": malformed JSON");
    }
    TrainConfig c = read_config(doc, "");
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ModelLoadError(std::string("config: ") + e.what());
    }
    return c;
}

std::string save_model(const GbdtModel& m) {
    std::ostringstream out;
    out << "{\n\"format\":\"" << kFormatName << "\",\n\"format_version\":" << kFormatVersion << ",\n";
    out << "\"feature_names\":[";
    for (std::size_t i = 0; i < m.feature_names.size(); ++i)
        out << (i ? "," : "") << quoted(m.feature_names[i]);
    out << "],\n\"learning_rate\":" << format_double(m.learning_rate)
        << ",\n\"base_margin\":" << format_double(m.base_margin) << ",\n";
    out << "\"config\":" << config_to_json(m.config) << ",\n";
    out << "\"n_trees\":" << m.trees.size() << ",\n\"trees\":[";
    for (std::size_t i = 0; i < m.trees.size(); ++i) {
        out << (i ? ",\n" : "\n") << "{\"n_nodes\":" << m.trees[i].nodes.size() << ",\"root\":";
        write_node(out, m.trees[i], 0);
        out << '}';
    }
    out << "\n]\n}\n";
    return out.str();
}

GbdtModel load_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ModelLoadError("model load error at byte " + std::to_string(e.byte) + ": malformed JSON");
    }
    only_keys(doc, "/", {"format", "format_version", "feature_names", "learning_rate", "base_margin", "config",
                         "n_trees", "trees"});
    const auto& fmt = need(doc, "/", "format");
    if (!fmt.is_string() || fmt.get<std::string>() != kFormatName) fail("/format", "not a wrist-gbdt model");
    long long version = need_int(doc, "/", "format_version");
    if (version != kFormatVersion)
        fail("/format_version", "unsupported version " + std::to_string(version) + " (expected " +
                                    std::to_string(kFormatVersion) + ")");

    GbdtModel m;
    const auto& names = need(doc, "/", "feature_names");
    if (!names.is_array() || names.empty()) fail("/feature_names", "expected a non-empty array");
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!names[i].is_string()) fail("/feature_names/" + std::to_string(i), "expected a string");
        m.feature_names.push_back(names[i].get<std::string>());
    }
    m.learning_rate = need_number(doc, "/", "learning_rate");
    m.base_margin = need_number(doc, "/", "base_margin");

    m.config = read_config(need(doc, "/", "config"), "/config");

    long long n_trees = need_int(doc, "/", "n_trees");
    const auto& trees = need(doc, "/", "trees");
    if (!trees.is_array()) fail("/trees", "expected an array");
    if (n_trees < 0 || static_cast<std::size_t>(n_trees) != trees.size())
        fail("/n_trees", "declares " + std::to_string(n_trees) + " trees, found " + std::to_string(trees.size()));
    m.trees.reserve(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const std::string where = "/trees/" + std::to_string(i);
        only_keys(trees[i], where, {"n_nodes", "root"});
        long long n_nodes = need_int(trees[i], where, "n_nodes");
        Tree t;
        read_node(need(trees[i], where, "root"), where + "/root", t, m.feature_names.size(), 0);
        if (n_nodes < 0 || static_cast<std::size_t>(n_nodes) != t.nodes.size())
            fail(where + "/n_nodes",
                 "declares " + std::to_string(n_nodes) + " nodes, found " + std::to_string(t.nodes.size()));
        m.trees.push_back(std::move(t));
    }
    return m;
}

}  // namespace wrist
