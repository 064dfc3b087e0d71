// expwalk <subcommand> --config FILE [--seed N] [--out PREFIX] [flags]

#include "expwalk/error.hpp"
#include "expwalk/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

json numbers(const std::string& s) {
    json arr = json::array();
    for (const auto& x : split(s, ',')) arr.push_back(json::parse(x));
    return arr;
}

/// "m,n,r_1..r_m,s_1..s_n"
json profile_flag(const std::string& s) {
    const auto v = numbers(s);
    if (v.size() < 2) throw expwalk::DomainError("cli", "parse", "--profile expects m,n,r...,s...");
    const int m = v[0].get<int>(), n = v[1].get<int>();
    if (static_cast<int>(v.size()) != 2 + m + n)
        throw expwalk::DomainError("cli", "parse", "--profile expects m + n weights after m,n");
    std::vector<double> r, w;
    for (int i = 0; i < m; ++i) r.push_back(v[2 + i].get<double>());
    for (int j = 0; j < n; ++j) w.push_back(v[2 + m + j].get<double>());
    return {{"m", m}, {"n", n}, {"r", r}, {"s", w}};
}

/// "r_1,..;s_1,.."
json weights_flag(const std::string& s) {
    const auto parts = split(s, ';');
    if (parts.size() != 2) throw expwalk::DomainError("cli", "parse", "--weights expects r1,...;s1,...");
    return {{"r", numbers(parts[0])}, {"s", numbers(parts[1])}};
}

/// "0,0;1,1;0,2"
json pattern_flag(const std::string& s) {
    json cells = json::array();
    for (const auto& c : split(s, ';')) cells.push_back(numbers(c));
    return cells;
}

struct Flags {
    std::string config, out, measure, rep, blocks, logs, profile, bases, pattern, weights;
    std::uint64_t seed = 0;
    int N = 0, len = 0;
    double tol = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments on expanding random walks, lattices and self-affine fractals"};
    app.require_subcommand(1);
    Flags f;
    for (const auto& kind : expwalk::experiment_kinds()) {
        auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
        sub->add_option("--config", f.config, "JSON (or key = value) config file");
        sub->add_option("--seed", f.seed, "64-bit seed (overrides the config)");
        sub->add_option("--out", f.out, "output prefix (overrides the config)");
        if (kind == "expand-cert" || kind == "walk" || kind == "height" || kind == "recur" || kind == "kau")
            sub->add_option("--measure", f.measure, "measure JSON file or preset name");
        if (kind == "expand-cert") {
            sub->add_option("--rep", f.rep, "std | adj | wedge:k | adjwedge:k");
            sub->add_option("--N", f.N, "convolution power");
        }
        if (kind == "cone") {
            sub->add_option("--blocks", f.blocks, "block sizes, e.g. 2,1,1");
            sub->add_option("--logs", f.logs, "trace-zero diagonal logs, e.g. 1,1,-2");
        }
        if (kind == "kau") {
            sub->add_option("--profile", f.profile, "m,n,r_1..r_m,s_1..s_n");
            sub->add_option("--len", f.len, "word length");
            sub->add_option("--tol", f.tol, "u-limit tolerance");
        }
        if (kind == "sponge" || kind == "dioph-fractal") {
            sub->add_option("--bases", f.bases, "grid bases a_1,..,a_m");
            sub->add_option("--pattern", f.pattern, "cells, e.g. 0,0;1,1;0,2");
        }
        if (kind == "sponge") sub->add_option("--weights", f.weights, "corollary | custom");
        if (kind.rfind("dioph", 0) == 0) sub->add_option("--weights", f.weights, "r_1,..;s_1,..");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    const std::string kind = sub->get_name();
    try {
        expwalk::ExperimentConfig cfg;
        if (!f.config.empty()) cfg = expwalk::ExperimentConfig::load(f.config);
        if (!cfg.kind.empty() && cfg.kind != kind)
            throw expwalk::DomainError("cli", "parse", "config kind '" + cfg.kind + "' does not match subcommand " + kind);
        cfg.kind = kind;
        if (sub->count("--seed")) cfg.seed = f.seed;
        if (sub->count("--out")) cfg.output = f.out;
        auto& p = cfg.params;
        auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
        if (given("--measure")) p["measure"] = f.measure;
        if (given("--rep")) p["rep"] = f.rep;
        if (given("--N")) p["N"] = f.N;
        if (given("--blocks")) p["blocks"] = numbers(f.blocks);
        if (given("--logs")) p["logs"] = numbers(f.logs);
        if (given("--profile")) p["profile"] = profile_flag(f.profile);
        if (given("--len")) p["len"] = f.len;
        if (given("--tol")) p["tol"] = f.tol;
        if (given("--bases")) p["bases"] = numbers(f.bases);
        if (given("--pattern")) p["pattern"] = pattern_flag(f.pattern);
        if (given("--weights")) {
            if (kind == "sponge") p["mode"] = f.weights;
            else p["weights"] = weights_flag(f.weights);
        }
        return expwalk::run(cfg, &std::cerr);
    } catch (const expwalk::Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == expwalk::ErrorKind::Validation ? 2 : 3;
    } catch (const json::exception& e) {
        std::cerr << "cli::parse: " << e.what() << "\n";
        return 2;
    }
}
