#include "mqc/cli.hpp"

#include <sstream>

#include <CLI11.hpp>

#include "mqc/harness.hpp"
#include "mqc/io.hpp"
#include "mqc/steering.hpp"

namespace mqc {

namespace {

// Raised while reading an input file so that parse failures inside files
// are told apart from partition grammar errors.
class FileError : public Error {
public:
    using Error::Error;
};

template <class F>
auto load(const std::string& path, F&& f) {
    try {
        return f(read_json_file(path));
    } catch (const Error& e) {
        throw FileError("'" + path + "': " + e.what());
    }
}

AnyState load_state(const std::string& path) {
    return load(path, [](const Json& j) { return state_from_json(j); });
}

std::size_t party_count(const AnyState& s) {
    return std::visit([](const auto& x) { return x.parties(); }, s);
}

// Accepts "1|2|3" or, for steering measures, "<untrusted>;<trusted>".
SubRepartition parse_target(const std::string& text, int n, int t) {
    if (text.find(';') != std::string::npos) return partition_from_split(parse_split(text, t, n));
    return parse_partition(text, n);
}

int infer_t(const std::string& split, int n) {
    const auto pos = split.find(';');
    if (pos == std::string::npos) throw ParseError("split must have the form '<untrusted>;<trusted>'");
    const auto u = parse_partition(split.substr(0, pos), n);
    int t = 0;
    for (int m : mask_members(u.support())) t = std::max(t, m + 1);
    return t;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("dims must be a comma separated list of positive integers");
        }
        if (used != tok.size() || v == 0) throw InvalidArgument("dims must be a comma separated list of positive integers");
        out.push_back(v);
    }
    if (out.empty()) throw InvalidArgument("dims must not be empty");
    return out;
}

void write_error(std::ostream& err, int code, const char* kind, const std::string& message) {
    err << Json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multipartite quantum correlation measures and axiom checks", "mqc"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads for suites")->check(CLI::PositiveNumber);

    std::string axes = "zx", measure_id, state_path, partition, suite_name, kind_name, split_text, meas_path, what, out_path, dims_text;
    std::size_t k = 2, trials = 50, rank = 0, n_parties = 3, local_dim = 2;
    double q = 2.0, tol_value = -1, eps_eq = 1e-6, eps_zero = 1e-6, eta = 0.5;
    int t = 1;
    std::uint64_t seed = 0;

    auto* measure = app.add_subcommand("measure", "Evaluate one measure on a state file");
    measure->add_option("--measure", measure_id)->required();
    measure->add_option("--state", state_path)->required();
    measure->add_option("--partition", partition)->required();
    measure->add_option("--k", k);
    measure->add_option("--q", q);
    measure->add_option("--t", t, "Untrusted parties 1..t for steering measures");
    measure->add_option("--seed", seed, "Seed for heuristic searches");

    auto* scan = app.add_subcommand("hierarchy-scan", "Check the hierarchy condition over related partitions");
    scan->add_option("--measure", measure_id)->required();
    scan->add_option("--state", state_path)->required();
    scan->add_option("--tol", tol_value);
    scan->add_option("--t", t);
    scan->add_option("--seed", seed);

    auto* axiom = app.add_subcommand("axiom-check", "Run an axiom suite on sampled inputs");
    axiom->add_option("--measure", measure_id)->required();
    axiom->add_option("--suite", suite_name)->required();
    axiom->add_option("--trials", trials)->required();
    axiom->add_option("--seed", seed)->required();
    axiom->add_option("--tol", tol_value);
    axiom->add_option("--dims", dims_text, "Subsystem dims or modes per party, e.g. 2,2,2");
    axiom->add_option("--k", k);
    axiom->add_option("--q", q);
    axiom->add_option("--t", t);

    auto* mono = app.add_subcommand("monogamy-check", "Scan a monogamy relation on a state");
    mono->add_option("--measure", measure_id)->required();
    mono->add_option("--state", state_path)->required();
    mono->add_option("--kind", kind_name)->required();
    mono->add_option("--eps-eq", eps_eq);
    mono->add_option("--eps-zero", eps_zero);
    mono->add_option("--seed", seed);

    auto* steer = app.add_subcommand("steer-check", "Test an assemblage for a local hidden state model");
    steer->add_option("--state", state_path)->required();
    steer->add_option("--split", split_text)->required();
    steer->add_option("--measurements", meas_path)->required();

    auto* gen = app.add_subcommand("gen", "Write a state file");
    gen->add_option("--what", what)->required()->check(CLI::IsMember({"ghz", "w", "werner", "random", "gaussian-random", "pauli"}));
    gen->add_option("--n", n_parties);
    gen->add_option("--d", local_dim);
    gen->add_option("--rank", rank);
    gen->add_option("--eta", eta);
    gen->add_option("--axes", axes, "Pauli axes per setting for --what pauli, e.g. zx");
    gen->add_option("--seed", seed);
    gen->add_option("--out", out_path)->required();

    std::vector<const char*> argv{"mqc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        err << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        write_error(err, exit_invalid_args, "invalid-arguments", e.what());
        return exit_invalid_args;
    }

    try {
        MeasureArgs margs;
        margs.k = k;
        margs.q = q;
        margs.t = t;
        margs.seed = seed ? seed : 1;

        if (*measure) {
            const auto& b = find_binding(measure_id);
            auto s = load_state(state_path);
            auto p = parse_target(partition, static_cast<int>(party_count(s)), t);
            out << to_json(b.evaluate(s, p, margs)).dump() << '\n';
            return exit_ok;
        }
        if (*scan) {
            const auto& b = find_binding(measure_id);
            auto s = load_state(state_path);
            ScanConfig cfg;
            cfg.tol = tol_value;
            cfg.args = margs;
            cfg.threads = threads;
            auto rep = hierarchy_scan(b, s, cfg);
            out << to_json(rep).dump() << '\n';
            return exit_code(rep);
        }
        if (*axiom) {
            const auto& b = find_binding(measure_id);
            AxiomConfig cfg;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.tol = tol_value;
            cfg.args = margs;
            cfg.threads = threads;
            if (!dims_text.empty()) cfg.dims = parse_dims(dims_text);
            auto rep = axiom_check(b, parse_suite(suite_name), cfg);
            out << to_json(rep).dump() << '\n';
            return exit_code(rep);
        }
        if (*mono) {
            const auto& b = find_binding(measure_id);
            auto s = load_state(state_path);
            MonogamyConfig cfg;
            cfg.eps_eq = eps_eq;
            cfg.eps_zero = eps_zero;
            cfg.args = margs;
            auto rep = monogamy_check(b, s, parse_monogamy(kind_name), cfg);
            out << to_json(rep).dump() << '\n';
            return exit_code(rep);
        }
        if (*steer) {
            auto s = load_state(state_path);
            const auto* d = std::get_if<DensityState>(&s);
            if (!d) throw InvalidArgument("steer-check needs a density-matrix state");
            const int n = static_cast<int>(d->parties());
            auto split = parse_split(split_text, infer_t(split_text, n), n);
            auto ma = load(meas_path, [](const Json& j) { return measurements_from_json(j); });
            auto sa = make_assemblage(*d, split, ma);
            auto r = lhs_check(sa);
            out << Json{{"verdict", to_string(r.verdict)},
                        {"split", split.to_string()},
                        {"strategies", r.strategies},
                        {"residual", r.residual},
                        {"certificate_value", r.certificate_value},
                        {"iterations", r.iterations},
                        {"note", r.note}}
                       .dump()
                << '\n';
            return exit_ok;
        }
        if (*gen) {
            Json j;
            const bool random = what == "random" || what == "gaussian-random";
            if (random && !gen->count("--seed")) throw InvalidArgument("--seed is required for random states");
            Rng rng(seed);
            if (what == "ghz") j = to_json(ghz(n_parties, local_dim));
            else if (what == "w") j = to_json(w_state(n_parties));
            else if (what == "werner") j = to_json(werner(eta));
            else if (what == "pauli") j = to_json(MeasurementAssemblage{std::vector<PartyMeasurements>(n_parties, pauli_measurements(axes))});
            else if (what == "random") j = to_json(sample_ginibre(Dims(n_parties, local_dim), rank, rng));
            else j = to_json(g_random(std::vector<std::size_t>(n_parties, 1), rng));
            write_json_file(out_path, j);
            out << Json{{"written", out_path}, {"kind", j["kind"]}}.dump() << '\n';
            return exit_ok;
        }
    } catch (const UnknownMeasureError& e) {
        write_error(err, exit_unknown_measure, "unknown-measure", e.what());
        return exit_unknown_measure;
    } catch (const FileError& e) {
        write_error(err, exit_malformed_file, "malformed-file", e.what());
        return exit_malformed_file;
    } catch (const ParseError& e) {
        write_error(err, exit_grammar, "grammar", e.what());
        return exit_grammar;
    } catch (const InvalidArgument& e) {
        write_error(err, exit_invalid_args, "invalid-arguments", e.what());
        return exit_invalid_args;
    } catch (const UnsupportedError& e) {
        write_error(err, exit_invalid_args, "invalid-arguments", e.what());
        return exit_invalid_args;
    } catch (const std::exception& e) {
        write_error(err, exit_internal, "internal", e.what());
        return exit_internal;
    }
    write_error(err, exit_internal, "internal", "no command ran");
    return exit_internal;
}

}  // namespace mqc
