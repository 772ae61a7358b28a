#include "summa/batches.hpp"
#include "summa/corpus.hpp"
#include "summa/io.hpp"
#include "summa/seqnorms.hpp"
#include "summa/summing.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace summa;
using nlohmann::json;

namespace {

enum Exit { ok = 0, failed = 1, invalid = 2, inadmissible = 3 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetFlags {
    int restarts = Budget{}.restarts;
    int iters = Budget{}.iters;
    int m_max = Budget{}.m_max;
    bool ascent = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--budget-restarts", restarts, "Multi-start restarts")->check(CLI::NonNegativeNumber);
        cmd->add_option("--budget-iters", iters, "Iterations per restart")->check(CLI::PositiveNumber);
        cmd->add_option("--m-max", m_max, "Longest test family per slot")->check(CLI::PositiveNumber);
        cmd->add_flag("--ascent", ascent, "Use ascent even where a closed form exists");
    }

    Budget make(std::uint64_t seed) const {
        Budget b;
        b.restarts = restarts;
        b.iters = iters;
        b.m_max = m_max;
        b.seed = seed;
        b.weak_mode = ascent ? WeakMode::ascent : WeakMode::automatic;
        if (const char* cap = std::getenv("SUMMA_ENUM_CAP")) {
            try {
                std::size_t used = 0;
                b.enum_cap = std::stoul(cap, &used);
                if (used != std::string(cap).size()) {
                    throw std::invalid_argument(cap);
                }
            } catch (const std::exception&) {
                throw UsageError("SUMMA_ENUM_CAP must be a non-negative integer, got '" + std::string(cap) + "'");
            }
        }
        return b;
    }
};

Exponent exponent_flag(const std::string& name, const std::string& text) {
    try {
        return Exponent::parse(text);
    } catch (const std::exception& e) {
        throw UsageError("--" + name + ": " + e.what());
    }
}

std::optional<Exponent> optional_exponent(const std::string& name, const std::string& text) {
    if (text.empty()) {
        return std::nullopt;
    }
    return exponent_flag(name, text);
}

void emit(const json& report, const std::string& out) {
    if (out.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write '" + out + "'");
    }
    f << report.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct NormCommand {
    std::string path;
    std::string kind;
    std::string p, s, q;
    std::vector<std::string> targets;
    std::optional<std::uint64_t> seed;
    std::string out;
    BudgetFlags budget;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("norm", "Evaluate a norm on the families or tensors of an instance file");
        cmd->add_option("instance", path, "Instance JSON file")->required();
        cmd->add_option("--kind", kind, "strong, weak, mixed, mixed-primal, mixed-dual, op or summing")->required();
        cmd->add_option("--p", p, "Exponent for strong and weak norms");
        cmd->add_option("--s", s, "Weak exponent of a mixed norm");
        cmd->add_option("--q", q, "Outer exponent of a mixed norm");
        cmd->add_option("--target", targets, "Family or tensor names (default: all)");
        cmd->add_option("--seed", seed, "Search seed (default: the instance seed)");
        cmd->add_option("--out", out, "Report path (default: stdout)");
        budget.add(cmd);
    }

    Exponent need(const std::string& name, const std::string& text) const {
        if (text.empty()) {
            throw UsageError("--kind " + kind + " needs --" + name);
        }
        return exponent_flag(name, text);
    }

    template <class T>
    std::vector<std::pair<std::string, const T*>> select(const std::vector<std::pair<std::string, T>>& named,
                                                         const char* what) const {
        std::vector<std::pair<std::string, const T*>> picked;
        for (const auto& [name, obj] : named) {
            if (targets.empty() || std::find(targets.begin(), targets.end(), name) != targets.end()) {
                picked.emplace_back(name, &obj);
            }
        }
        if (picked.empty()) {
            throw UsageError(std::string("instance has no matching ") + what);
        }
        return picked;
    }

    int run(const std::vector<std::string>& argv) const {
        static const std::vector<std::string> kinds = {"strong",     "weak", "mixed",  "mixed-primal",
                                                       "mixed-dual", "op",   "summing"};
        if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
            throw UsageError("unknown norm kind '" + kind + "'");
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Instance inst = load_instance(path);
        const std::uint64_t used_seed = seed.value_or(inst.seed);
        const Budget b = budget.make(used_seed);

        json items = json::array();
        const auto item = [&](const std::string& target, json params, const NormEstimate& e) {
            json j = to_json(e);
            j["target"] = target;
            j["norm"] = kind;
            j["params"] = std::move(params);
            items.push_back(std::move(j));
        };
        if (kind == "strong" || kind == "weak") {
            const Exponent pe = need("p", p);
            for (const auto& [name, fam] : select(inst.families, "families")) {
                item(name, {{"p", exponent_json(pe)}}, kind == "strong" ? strong_norm(*fam, pe) : weak_norm(*fam, pe, b));
            }
        } else if (kind.rfind("mixed", 0) == 0) {
            const Exponent se = need("s", s), qe = need("q", q);
            const json params = {{"s", exponent_json(se)}, {"q", exponent_json(qe)}};
            for (const auto& [name, fam] : select(inst.families, "families")) {
                if (kind == "mixed-primal") {
                    item(name, params, mixed_norm_primal(*fam, se, qe, b));
                } else if (kind == "mixed-dual") {
                    item(name, params, mixed_norm_dual(*fam, se, qe, b));
                } else {
                    const auto bracket = mixed_norm(*fam, se, qe, b);
                    json j = {{"target", name},
                              {"norm", kind},
                              {"params", params},
                              {"lower", to_json(bracket.lower)},
                              {"upper", to_json(bracket.upper)}};
                    items.push_back(std::move(j));
                }
            }
        } else if (kind == "op") {
            for (const auto& [name, t] : select(inst.tensors, "tensors")) {
                item(name, json::object(), op_norm(*t, b));
            }
        } else {
            if (!inst.params) {
                throw UsageError("--kind summing needs a 'params' object in the instance");
            }
            for (const auto& [name, t] : select(inst.tensors, "tensors")) {
                item(name, to_json(*inst.params), estimate_norm(*t, *inst.params, b));
            }
        }
        emit(report_file(argv, used_seed, seconds_since(t0), std::move(items)), out);
        return Exit::ok;
    }
};

struct VerifyCommand {
    std::string law;
    std::size_t count = 100;
    std::uint64_t seed = 0;
    std::vector<std::size_t> dims;
    std::optional<std::size_t> arity;
    std::string p, q, r, s;
    bool no_exhaustive = false;
    std::string out;
    BudgetFlags budget;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("verify", "Run one law over a seeded corpus");
        cmd->add_option("law", law, "Law id")->required();
        cmd->add_option("--count", count, "Corpus size");
        cmd->add_option("--seed", seed, "Corpus seed");
        cmd->add_option("--N", dims, "Dimensions to cycle through")->delimiter(',');
        cmd->add_option("--n", arity, "Arity of the maps");
        cmd->add_option("--p", p, "Exponent override");
        cmd->add_option("--q", q, "Exponent override");
        cmd->add_option("--r", r, "Exponent override");
        cmd->add_option("--s", s, "Exponent override");
        cmd->add_flag("--no-exhaustive", no_exhaustive, "Littlewood: use ascent instead of enumeration");
        cmd->add_option("--out", out, "Report path (default: stdout)");
        budget.add(cmd);
    }

    int run(const std::vector<std::string>& argv) const {
        const auto& ids = law_ids();
        if (std::find(ids.begin(), ids.end(), law) == ids.end()) {
            throw UsageError("unknown law id '" + law + "'");
        }
        const auto t0 = std::chrono::steady_clock::now();
        BatchOptions o;
        o.count = count;
        o.seed = seed;
        o.dims = dims;
        o.arity = arity;
        o.p = optional_exponent("p", p);
        o.q = optional_exponent("q", q);
        o.r = optional_exponent("r", r);
        o.s = optional_exponent("s", s);
        o.exhaustive = !no_exhaustive;
        o.budget = budget.make(seed);
        const BatchResult res = run_batch(law, o);

        json report = report_file(argv, seed, seconds_since(t0), json::array({to_json(res)}));
        report["verdict"] = to_string(res.verdict);
        report["inconclusive"] = res.verdict == Verdict::inconclusive;
        emit(report, out);

        std::cerr << law << ": " << res.passed << " pass, " << res.failed << " fail, " << res.inconclusive
                  << " inconclusive\n";
        for (const auto& [key, value] : res.summary) {
            std::cerr << "  " << key << " = " << value << "\n";
        }
        if (res.verdict == Verdict::inconclusive) {
            std::cerr << "note: no violations, but some checks were inconclusive\n";
        }
        return res.failed ? Exit::failed : Exit::ok;
    }
};

struct GenCommand {
    std::string kind;
    std::size_t n = 2;
    std::size_t dim = 4;
    std::string u = "inf";
    std::size_t m = 0;
    std::size_t codomain_dim = 1;
    std::string v = "2";
    std::uint64_t seed = 0;
    std::string out;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("gen", "Write a generated instance file");
        cmd->add_option("kind", kind, "gaussian-tensor, sign-tensor, fourier-tensor, basis-family or gaussian-family")
            ->required();
        cmd->add_option("--n", n, "Arity");
        cmd->add_option("--N", dim, "Dimension of the domain spaces");
        cmd->add_option("--u", u, "Exponent of the domain spaces");
        cmd->add_option("--m", m, "Family length (default: N for basis, 4 for gaussian)");
        cmd->add_option("--codomain-dim", codomain_dim, "Codomain dimension (1 = scalar)");
        cmd->add_option("--v", v, "Codomain exponent");
        cmd->add_option("--seed", seed, "Generator seed");
        cmd->add_option("--out", out, "Instance path (default: stdout)");
    }

    int run() const {
        if (dim == 0 || n == 0 || codomain_dim == 0) {
            throw UsageError("--n, --N and --codomain-dim must be positive");
        }
        const SpaceSpec e(exponent_flag("u", u), dim);
        Instance inst;
        inst.seed = seed;
        inst.spaces.emplace_back("E", e);
        const std::vector<SpaceSpec> domain(n, e);
        SpaceSpec f = scalar_space();
        if (codomain_dim > 1) {
            f = SpaceSpec(exponent_flag("v", v), codomain_dim);
            inst.spaces.emplace_back("F", f);
        }
        if (kind == "gaussian-tensor") {
            inst.tensors.emplace_back("T", gaussian_tensor(domain, f, seed));
        } else if (kind == "sign-tensor") {
            inst.tensors.emplace_back("T", sign_tensor(domain, f, seed));
        } else if (kind == "fourier-tensor") {
            inst.tensors.emplace_back("T", fourier_tensor(n, dim, e.exponent));
        } else if (kind == "basis-family") {
            inst.families.emplace_back("x", basis_family(e, m));
        } else if (kind == "gaussian-family") {
            inst.families.emplace_back("x", gaussian_family(e, m ? m : 4, seed));
        } else {
            throw UsageError("unknown generator kind '" + kind + "'");
        }
        const std::string text = dump_instance(inst);
        if (out.empty()) {
            std::cout << text;
        } else {
            std::ofstream fout(out, std::ios::binary);
            if (!fout) {
                throw UsageError("cannot write '" + out + "'");
            }
            fout << text;
        }
        return Exit::ok;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"summa: summing-type norms on finite-dimensional lp spaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    NormCommand norm;
    VerifyCommand verify;
    GenCommand gen;
    norm.add(app);
    verify.add(app);
    gen.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Exit::invalid;
    }

    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (app.got_subcommand("norm")) {
            return norm.run(args);
        }
        if (app.got_subcommand("verify")) {
            return verify.run(args);
        }
        return gen.run();
    } catch (const InadmissibleExponents& e) {
        std::cerr << "error: inadmissible exponents: " << e.constraint() << "\n";
        return Exit::inadmissible;
    } catch (const InstanceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::invalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::invalid;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::invalid;
    }
}
