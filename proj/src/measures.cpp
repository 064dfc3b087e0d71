#include "expwalk/measures.hpp"

#include "expwalk/error.hpp"
#include "expwalk/kau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace expwalk {

GroupMeasure::GroupMeasure(std::vector<Atom> atoms, std::uint64_t seed)
    : atoms_(std::move(atoms)), seed_(seed) {
    if (atoms_.empty())
        throw DomainError("measures", "GroupMeasure", "no atoms");
    dim_ = static_cast<int>(atoms_.front().g.rows());
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto& a = atoms_[i];
        if (a.g.rows() != dim_ || a.g.cols() != dim_)
            throw DomainError("measures", "GroupMeasure", "atom " + std::to_string(i) + " has wrong shape");
        if (!all_finite(a.g))
            throw DomainError("measures", "GroupMeasure", "atom " + std::to_string(i) + " is not finite");
        if (!(a.weight > 0.0))
            throw DomainError("measures", "GroupMeasure", "atom weights must be positive");
        if (std::abs(a.g.determinant()) <= 1e-12)
            throw DomainError("measures", "GroupMeasure", "atom " + std::to_string(i) + " is singular");
        total += a.weight;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("measures", "GroupMeasure", "weights must sum to 1");
}

GroupMeasure::GroupMeasure(int dim, Sampler sampler, std::uint64_t seed)
    : dim_(dim), sampler_(std::move(sampler)), seed_(seed) {
    if (dim < 1 || !sampler_)
        throw DomainError("measures", "GroupMeasure", "sampler measure needs a dimension and a sampler");
}

GroupMeasure GroupMeasure::dirac(const Mat& g) {
    return GroupMeasure({{g, 1.0}});
}

GroupMeasure GroupMeasure::uniform(const std::vector<Mat>& gs) {
    std::vector<Atom> atoms;
    for (const auto& g : gs) atoms.push_back({g, 1.0 / static_cast<double>(gs.size())});
    return GroupMeasure(std::move(atoms));
}

void GroupMeasure::set_profile(ParabolicProfile p) {
    if (p.dim() != dim_)
        throw DomainError("measures", "set_profile", "profile dimension mismatch");
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (!is_block_upper(atoms_[i].g, p.m, 1e-9))
            throw DomainError("measures", "set_profile",
                              "atom " + std::to_string(i) + " is not block upper triangular");
    profile_ = std::move(p);
}

std::size_t GroupMeasure::draw_index(CounterRng& rng) const {
    if (!is_atomic())
        throw DomainError("measures", "draw_index", "measure is sampler-backed");
    if (atoms_.size() == 1) return 0;
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
}

Mat GroupMeasure::draw(CounterRng& rng) const {
    if (sampler_) return sampler_(rng);
    return atoms_[draw_index(rng)].g;
}

std::vector<std::size_t> sample_word_indices(const GroupMeasure& mu, int n, std::uint64_t seed) {
    if (n < 0)
        throw DomainError("measures", "sample_word", "negative length");
    CounterRng rng(seed);
    std::vector<std::size_t> out(static_cast<std::size_t>(n));
    for (auto& i : out) i = mu.draw_index(rng);
    return out;
}

std::vector<Mat> sample_word(const GroupMeasure& mu, int n, std::uint64_t seed) {
    if (n < 0)
        throw DomainError("measures", "sample_word", "negative length");
    CounterRng rng(seed);
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(mu.draw(rng));
    return out;
}

std::size_t word_count(std::size_t atoms, int n) {
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (atoms != 0 && total > std::numeric_limits<std::size_t>::max() / atoms)
            return std::numeric_limits<std::size_t>::max();
        total *= atoms;
    }
    return total;
}

namespace {

double max_entry_distance(const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Merges atoms agreeing entrywise within kMergeTol. Sorting by the first
// entry bounds the candidate window for each representative.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.g(0, 0) < b.g(0, 0); });
    std::vector<bool> used(atoms.size(), false);
    std::vector<Atom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (used[i]) continue;
        Atom rep = atoms[i];
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            if (atoms[j].g(0, 0) - atoms[i].g(0, 0) > kMergeTol) break;
            if (!used[j] && max_entry_distance(atoms[i].g, atoms[j].g) <= kMergeTol) {
                rep.weight += atoms[j].weight;
                used[j] = true;
            }
        }
        out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace

GroupMeasure convolution_support(const GroupMeasure& mu, int n, std::size_t cap) {
    if (!mu.is_atomic())
        throw DomainError("measures", "convolution_support", "measure is sampler-backed; use Monte Carlo");
    if (n < 0)
        throw DomainError("measures", "convolution_support", "negative power");
    if (word_count(mu.size(), n) > cap)
        throw CapError("measures", "convolution_support",
                       std::to_string(mu.size()) + "^" + std::to_string(n) +
                           " words exceed the cap; use Monte Carlo");
    std::vector<Atom> current{{Mat::Identity(mu.dim(), mu.dim()), 1.0}};
    for (int step = 0; step < n; ++step) {
        std::vector<Atom> next;
        next.reserve(current.size() * mu.size());
        for (const auto& c : current)
            for (const auto& a : mu.atoms()) next.push_back({a.g * c.g, a.weight * c.weight});
        current = merge_atoms(std::move(next));
    }
    // Renormalize away rounding in the products of weights.
    double total = 0.0;
    for (const auto& a : current) total += a.weight;
    for (auto& a : current) a.weight /= total;
    return GroupMeasure(std::move(current), mu.seed());
}

double exp_moment_estimate(const GroupMeasure& mu, double delta) {
    if (!(delta > 0.0))
        throw DomainError("measures", "exp_moment_estimate", "delta must be positive");
    double sum = 0.0;
    for (const auto& a : mu.atoms()) sum += a.weight * std::pow(operator_norms(a.g).N, delta);
    return sum;
}

double lambda_average(const GroupMeasure& mu, const ParabolicProfile& profile) {
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
        const auto& a = mu.atoms()[i];
        try {
            sum += a.weight * kau_factorize(a.g, profile).t;
        } catch (const FactorizationError& e) {
            throw FactorizationError("lambda_average", e.what(), static_cast<long>(i));
        }
    }
    return sum;
}

std::string exact_decimal(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(exact_decimal(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

double number_from_json(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        char* end = nullptr;
        const double x = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw DomainError("measures", "matrix_from_json", "bad number '" + s + "'");
        return x;
    }
    throw DomainError("measures", "matrix_from_json", "entry is neither number nor string");
}

}  // namespace

Mat matrix_from_json(const nlohmann::json& j) {
    if (j.is_number() || j.is_string()) {
        Mat m(1, 1);
        m(0, 0) = number_from_json(j);
        return m;
    }
    if (!j.is_array() || j.empty())
        throw DomainError("measures", "matrix_from_json", "matrix must be a non-empty array of rows");
    // A flat array of numbers is a single row.
    if (!j.front().is_array()) {
        Mat m(1, static_cast<Eigen::Index>(j.size()));
        for (std::size_t c = 0; c < j.size(); ++c) m(0, static_cast<Eigen::Index>(c)) = number_from_json(j[c]);
        return m;
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw DomainError("measures", "matrix_from_json", "ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

nlohmann::json measure_to_json(const GroupMeasure& mu) {
    if (!mu.is_atomic())
        throw DomainError("measures", "measure_to_json", "sampler-backed measures cannot be serialized");
    nlohmann::json j;
    j["dim"] = mu.dim();
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : mu.atoms())
        j["atoms"].push_back({{"matrix", matrix_to_json(a.g)}, {"weight", exact_decimal(a.weight)}});
    if (mu.profile()) {
        const auto& p = *mu.profile();
        j["profile"] = {{"m", p.m}, {"n", p.n}, {"r", p.weights.r}, {"s", p.weights.s}};
    }
    return j;
}

GroupMeasure measure_from_json(const nlohmann::json& j) {
    if (!j.contains("atoms") || !j["atoms"].is_array())
        throw DomainError("measures", "measure_from_json", "missing atoms array");
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) {
        if (!a.contains("matrix"))
            throw DomainError("measures", "measure_from_json", "atom without matrix");
        const double w = a.contains("weight") ? number_from_json(a["weight"])
                                              : 1.0 / static_cast<double>(j["atoms"].size());
        atoms.push_back({matrix_from_json(a["matrix"]), w});
    }
    GroupMeasure mu(std::move(atoms));
    if (j.contains("dim") && j["dim"].get<int>() != mu.dim())
        throw DomainError("measures", "measure_from_json", "dim does not match the atoms");
    if (j.contains("profile")) {
        const auto& p = j["profile"];
        WeightPair w(p.at("r").get<std::vector<double>>(), p.at("s").get<std::vector<double>>());
        mu.set_profile(ParabolicProfile(std::move(w)));
    }
    return mu;
}

GroupMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("measures", "load_measure", "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("measures", "load_measure", std::string("invalid JSON: ") + e.what());
    }
    return measure_from_json(j);
}

void save_measure(const GroupMeasure& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DomainError("measures", "save_measure", "cannot write '" + path + "'");
    out << measure_to_json(mu).dump(2) << '\n';
}

}  // namespace expwalk
