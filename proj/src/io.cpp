#include "summa/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace summa {

using nlohmann::json;

InstanceError::InstanceError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message
                              : message),
      line_(line), column_(column) {}

namespace {

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

/// Byte offset of every value in an already validated JSON text, keyed by
/// JSON pointer.
class PointerIndex {
public:
    explicit PointerIndex(const std::string& text) : text_(text) { value(""); }

    std::size_t offset(std::string pointer) const {
        while (true) {
            if (auto it = offsets_.find(pointer); it != offsets_.end()) {
                return it->second;
            }
            if (pointer.empty()) {
                return 0;
            }
            pointer.erase(pointer.rfind('/'));
        }
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                        text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    std::string string() {
        std::string raw;
        ++pos_; // opening quote
        while (text_[pos_] != '"') {
            if (text_[pos_] == '\\') {
                ++pos_;
                const char c = text_[pos_];
                raw += c == 'n' ? '\n' : c == 't' ? '\t' : c;
                if (c == 'u') {
                    pos_ += 4;
                }
            } else {
                raw += text_[pos_];
            }
            ++pos_;
        }
        ++pos_;
        return raw;
    }

    void value(const std::string& pointer) {
        skip_ws();
        offsets_[pointer] = pos_;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (text_[pos_] != '}') {
                const std::string key = string();
                skip_ws();
                ++pos_; // ':'
                value(pointer + "/" + escape_token(key));
                skip_ws();
                if (text_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            std::size_t i = 0;
            while (text_[pos_] != ']') {
                value(pointer + "/" + std::to_string(i++));
                skip_ws();
                if (text_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '"') {
            string();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) {
                ++pos_;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::map<std::string, std::size_t> offsets_;
};

struct Bad {
    std::string pointer;
    std::string message;
};

const json& field(const json& obj, const std::string& key, const std::string& ptr) {
    if (!obj.is_object()) {
        throw Bad{ptr, "expected an object"};
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw Bad{ptr, "missing field '" + key + "'"};
    }
    return *it;
}

std::string get_string(const json& j, const std::string& ptr) {
    if (!j.is_string()) {
        throw Bad{ptr, "expected a string"};
    }
    return j.get<std::string>();
}

std::size_t get_size(const json& j, const std::string& ptr) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw Bad{ptr, "expected a non-negative integer"};
    }
    return j.get<std::size_t>();
}

std::vector<std::size_t> get_shape(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) {
        throw Bad{ptr, "expected a non-empty array of sizes"};
    }
    std::vector<std::size_t> shape;
    for (std::size_t i = 0; i < j.size(); ++i) {
        shape.push_back(get_size(j[i], ptr + "/" + std::to_string(i)));
    }
    return shape;
}

Exponent get_exponent(const json& j, const std::string& ptr) {
    try {
        return exponent_from_json(j);
    } catch (const std::exception& e) {
        throw Bad{ptr, e.what()};
    }
}

void read_nested(const json& j, const std::vector<std::size_t>& shape, std::size_t depth, const std::string& ptr,
                 std::vector<double>& out) {
    if (depth == shape.size()) {
        if (!j.is_number()) {
            throw Bad{ptr, "expected a number"};
        }
        out.push_back(j.get<double>());
        return;
    }
    if (!j.is_array()) {
        throw Bad{ptr, "expected an array of length " + std::to_string(shape[depth])};
    }
    if (j.size() != shape[depth]) {
        throw Bad{ptr, "array has length " + std::to_string(j.size()) + ", shape says " +
                           std::to_string(shape[depth])};
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        read_nested(j[i], shape, depth + 1, ptr + "/" + std::to_string(i), out);
    }
}

json write_nested(std::span<const double> flat, const std::vector<std::size_t>& shape, std::size_t depth,
                  std::size_t& at) {
    if (depth == shape.size()) {
        return flat[at++];
    }
    json arr = json::array();
    for (std::size_t i = 0; i < shape[depth]; ++i) {
        arr.push_back(write_nested(flat, shape, depth + 1, at));
    }
    return arr;
}

json nested(std::span<const double> flat, const std::vector<std::size_t>& shape) {
    std::size_t at = 0;
    return write_nested(flat, shape, 0, at);
}

template <class T>
void require_unique(const std::vector<std::pair<std::string, T>>& named, const std::string& name,
                    const std::string& ptr) {
    for (const auto& [n, _] : named) {
        if (n == name) {
            throw Bad{ptr, "duplicate name '" + name + "'"};
        }
    }
}

SpaceSpec lookup_space(const Instance& inst, const json& j, const std::string& ptr) {
    const std::string name = get_string(j, ptr);
    for (const auto& [n, s] : inst.spaces) {
        if (n == name) {
            return s;
        }
    }
    if (name == "K") {
        return scalar_space();
    }
    throw Bad{ptr, "unknown space '" + name + "'"};
}

SummingParams read_params(const json& j, const std::string& ptr) {
    SummingKind kind;
    try {
        kind = parse_summing_kind(get_string(field(j, "kind", ptr), ptr + "/kind"));
    } catch (const std::invalid_argument& e) {
        throw Bad{ptr + "/kind", e.what()};
    }
    SummingParams params{kind, get_exponent(field(j, "sum", ptr), ptr + "/sum"), {}, std::nullopt, std::nullopt};
    const json& slots = field(j, "slots", ptr);
    if (!slots.is_array() || slots.empty()) {
        throw Bad{ptr + "/slots", "expected a non-empty array of exponents"};
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        params.slot_exponents.push_back(get_exponent(slots[i], ptr + "/slots/" + std::to_string(i)));
    }
    if (j.contains("r")) {
        params.functional_exponent = get_exponent(j["r"], ptr + "/r");
    }
    if (j.contains("s")) {
        params.mixing_exponent = get_exponent(j["s"], ptr + "/s");
    }
    const bool needs_r = params.kind == SummingKind::as_linear_pqr || params.kind == SummingKind::as_multi_r ||
                         params.kind == SummingKind::multiple_r;
    if (needs_r && !params.functional_exponent) {
        throw Bad{ptr, "kind " + to_string(params.kind) + " needs 'r'"};
    }
    if (params.kind == SummingKind::mixing_multi && !params.mixing_exponent) {
        throw Bad{ptr, "kind mixing_multi needs 's'"};
    }
    return params;
}

Instance build_instance(const json& root) {
    if (!root.is_object()) {
        throw Bad{"", "instance must be a JSON object"};
    }
    const std::string version = get_string(field(root, "version", ""), "/version");
    if (version != kInstanceVersion) {
        throw Bad{"/version", "unrecognized version '" + version + "', expected '" + kInstanceVersion + "'"};
    }
    Instance inst;
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) {
            throw Bad{"/seed", "expected a non-negative integer"};
        }
        inst.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("comment")) {
        inst.comment = get_string(root["comment"], "/comment");
    }
    if (root.contains("spaces")) {
        const json& spaces = root["spaces"];
        if (!spaces.is_object()) {
            throw Bad{"/spaces", "expected an object of named spaces"};
        }
        for (const auto& [name, spec] : spaces.items()) {
            const std::string ptr = "/spaces/" + escape_token(name);
            const Exponent e = get_exponent(field(spec, "exponent", ptr), ptr + "/exponent");
            const std::size_t dim = get_size(field(spec, "dim", ptr), ptr + "/dim");
            try {
                inst.spaces.emplace_back(name, SpaceSpec(e, dim));
            } catch (const std::invalid_argument& err) {
                throw Bad{ptr, err.what()};
            }
        }
    }
    if (root.contains("tensors")) {
        const json& tensors = root["tensors"];
        if (!tensors.is_array()) {
            throw Bad{"/tensors", "expected an array"};
        }
        for (std::size_t t = 0; t < tensors.size(); ++t) {
            const std::string ptr = "/tensors/" + std::to_string(t);
            const json& tj = tensors[t];
            const std::string name = get_string(field(tj, "name", ptr), ptr + "/name");
            require_unique(inst.tensors, name, ptr + "/name");
            const json& dom = field(tj, "domain", ptr);
            if (!dom.is_array() || dom.empty()) {
                throw Bad{ptr + "/domain", "expected a non-empty array of space names"};
            }
            std::vector<SpaceSpec> domain;
            for (std::size_t k = 0; k < dom.size(); ++k) {
                domain.push_back(lookup_space(inst, dom[k], ptr + "/domain/" + std::to_string(k)));
            }
            const SpaceSpec codomain = lookup_space(inst, field(tj, "codomain", ptr), ptr + "/codomain");
            const auto shape = get_shape(field(tj, "shape", ptr), ptr + "/shape");
            std::vector<std::size_t> expected;
            for (const auto& d : domain) {
                expected.push_back(d.dim);
            }
            expected.push_back(codomain.dim);
            if (shape != expected) {
                throw Bad{ptr + "/shape", "shape does not match the domain and codomain dimensions"};
            }
            std::vector<double> coeffs;
            read_nested(field(tj, "data", ptr), shape, 0, ptr + "/data", coeffs);
            inst.tensors.emplace_back(name, MultilinearMap(domain, codomain, std::move(coeffs)));
        }
    }
    if (root.contains("families")) {
        const json& fams = root["families"];
        if (!fams.is_array()) {
            throw Bad{"/families", "expected an array"};
        }
        for (std::size_t f = 0; f < fams.size(); ++f) {
            const std::string ptr = "/families/" + std::to_string(f);
            const json& fj = fams[f];
            const std::string name = get_string(field(fj, "name", ptr), ptr + "/name");
            require_unique(inst.families, name, ptr + "/name");
            const SpaceSpec space = lookup_space(inst, field(fj, "space", ptr), ptr + "/space");
            const auto shape = get_shape(field(fj, "shape", ptr), ptr + "/shape");
            auto full = shape;
            full.push_back(space.dim);
            std::vector<double> data;
            read_nested(field(fj, "data", ptr), full, 0, ptr + "/data", data);
            inst.families.emplace_back(name, VectorFamily(space, shape, std::move(data)));
        }
    }
    if (root.contains("params")) {
        inst.params = read_params(root["params"], "/params");
    }
    return inst;
}

} // namespace

json exponent_json(const Exponent& e) {
    if (e.is_infinite()) {
        return "inf";
    }
    return e.value();
}

Exponent exponent_from_json(const json& j) {
    if (j.is_string()) {
        return Exponent::parse(j.get<std::string>());
    }
    if (j.is_number()) {
        return Exponent(j.get<double>());
    }
    throw std::invalid_argument("expected an exponent (a number or \"inf\")");
}

Instance parse_instance(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string what = e.what();
        if (const auto at = what.find("syntax error"); at != std::string::npos) {
            what = what.substr(at);
        }
        throw InstanceError(what, line, col);
    }
    try {
        return build_instance(root);
    } catch (const Bad& bad) {
        const PointerIndex index(text);
        const auto [line, col] = line_col(text, index.offset(bad.pointer));
        const std::string where = bad.pointer.empty() ? "" : " (at " + bad.pointer + ")";
        throw InstanceError(bad.message + where, line, col);
    }
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InstanceError("cannot open instance file '" + path + "'", 0, 0);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

std::string dump_instance(const Instance& inst) {
    json root;
    root["version"] = kInstanceVersion;
    root["seed"] = inst.seed;
    if (!inst.comment.empty()) {
        root["comment"] = inst.comment;
    }
    root["spaces"] = json::object();
    const auto name_of = [&](const SpaceSpec& s) -> std::string {
        for (const auto& [n, spec] : inst.spaces) {
            if (spec == s) {
                return n;
            }
        }
        if (s == scalar_space()) {
            return "K";
        }
        throw std::invalid_argument("a space of dimension " + std::to_string(s.dim) + " has no name in the instance");
    };
    for (const auto& [name, spec] : inst.spaces) {
        root["spaces"][name] = to_json(spec);
    }
    root["tensors"] = json::array();
    for (const auto& [name, t] : inst.tensors) {
        json tj;
        tj["name"] = name;
        tj["domain"] = json::array();
        for (const auto& d : t.domain()) {
            tj["domain"].push_back(name_of(d));
        }
        tj["codomain"] = name_of(t.codomain());
        tj["shape"] = t.shape();
        tj["data"] = nested(t.coeffs(), t.shape());
        root["tensors"].push_back(std::move(tj));
    }
    root["families"] = json::array();
    for (const auto& [name, fam] : inst.families) {
        json fj;
        fj["name"] = name;
        fj["space"] = name_of(fam.space());
        fj["shape"] = fam.shape();
        auto full = fam.shape();
        full.push_back(fam.dim());
        fj["data"] = nested(fam.data(), full);
        root["families"].push_back(std::move(fj));
    }
    if (inst.params) {
        root["params"] = to_json(*inst.params);
    }
    return root.dump(2) + "\n";
}

json to_json(const SpaceSpec& s) { return {{"exponent", exponent_json(s.exponent)}, {"dim", s.dim}}; }

json to_json(const VectorFamily& fam) {
    return {{"space", to_json(fam.space())},
            {"shape", fam.shape()},
            {"data", std::vector<double>(fam.data().begin(), fam.data().end())}};
}

json to_json(const SummingParams& params) {
    json j;
    j["kind"] = to_string(params.kind);
    j["sum"] = exponent_json(params.sum_exponent);
    j["slots"] = json::array();
    for (const auto& e : params.slot_exponents) {
        j["slots"].push_back(exponent_json(e));
    }
    if (params.functional_exponent) {
        j["r"] = exponent_json(*params.functional_exponent);
    }
    if (params.mixing_exponent) {
        j["s"] = exponent_json(*params.mixing_exponent);
    }
    return j;
}

json to_json(const Budget& b) {
    return {{"restarts", b.restarts},
            {"iters", b.iters},
            {"seed", b.seed},
            {"enum_cap", b.enum_cap},
            {"weak_mode", b.weak_mode == WeakMode::ascent ? "ascent" : "automatic"},
            {"atoms", b.atoms},
            {"m_max", b.m_max}};
}

json to_json(const Witness& witness) {
    return std::visit(
        [](const auto& w) -> json {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<W, Functional>) {
                return {{"type", "functional"}, {"space", to_json(w.space)}, {"coords", w.coords}};
            } else if constexpr (std::is_same_v<W, std::vector<Vector>>) {
                json args = json::array();
                for (const auto& v : w) {
                    args.push_back({{"space", to_json(v.space)}, {"coords", v.coords}});
                }
                return {{"type", "arguments"}, {"arguments", std::move(args)}};
            } else if constexpr (std::is_same_v<W, FactorizationWitness>) {
                return {{"type", "factorization"}, {"taus", w.taus}, {"ys", to_json(w.ys)}};
            } else if constexpr (std::is_same_v<W, DiscreteMeasure>) {
                json atoms = json::array();
                for (const auto& a : w.atoms) {
                    atoms.push_back(a.coords);
                }
                return {{"type", "measure"}, {"atoms", std::move(atoms)}, {"weights", w.weights}};
            } else {
                json xs = json::array();
                for (const auto& f : w.x_families) {
                    xs.push_back(to_json(f));
                }
                json j = {{"type", "summing"},
                          {"x_families", std::move(xs)},
                          {"lhs", w.lhs},
                          {"rhs", w.rhs},
                          {"ratio", w.ratio}};
                j["phis"] = w.phis ? to_json(*w.phis) : json(nullptr);
                return j;
            }
        },
        witness);
}

json to_json(const NormEstimate& e) {
    return {{"value", e.value},
            {"kind", to_string(e.kind)},
            {"certified", e.certified},
            {"budget", to_json(e.budget)},
            {"witness", to_json(e.witness)}};
}

json to_json(const LawReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"tolerance", c.tolerance},
                          {"comparison", to_string(c.comparison)},
                          {"margin", c.margin},
                          {"verdict", to_string(c.verdict)}});
    }
    return {{"law_id", r.law_id},
            {"instance", r.instance},
            {"checks", std::move(checks)},
            {"metrics", r.metrics},
            {"witness", r.witness},
            {"verdict", to_string(r.verdict)}};
}

json to_json(const BatchResult& b) {
    json reports = json::array();
    for (const auto& r : b.reports) {
        reports.push_back(to_json(r));
    }
    return {{"law_id", b.law_id},
            {"verdict", to_string(b.verdict)},
            {"passed", b.passed},
            {"failed", b.failed},
            {"inconclusive", b.inconclusive},
            {"summary", b.summary},
            {"reports", std::move(reports)}};
}

json report_file(const std::vector<std::string>& command, std::uint64_t seed, double wall_time_s, json items) {
    return {{"tool", "summa"},
            {"version", kToolVersion},
            {"command", command},
            {"seed", seed},
            {"wall_time_s", wall_time_s},
            {"items", std::move(items)}};
}

std::string canonical_report(const json& report) {
    json copy = report;
    copy.erase("wall_time_s");
    return copy.dump();
}

} // namespace summa
