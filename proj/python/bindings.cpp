#include "expwalk/dioph.hpp"
#include "expwalk/error.hpp"
#include "expwalk/expansion.hpp"
#include "expwalk/fractal.hpp"
#include "expwalk/kau.hpp"
#include "expwalk/lattices.hpp"
#include "expwalk/linalg.hpp"
#include "expwalk/measures.hpp"
#include "expwalk/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace expwalk;

namespace {

GroupMeasure make_measure(const std::vector<Mat>& mats, std::vector<double> weights, std::uint64_t seed) {
    if (weights.empty()) weights.assign(mats.size(), 1.0 / static_cast<double>(mats.size()));
    if (weights.size() != mats.size()) throw DomainError("measures", "GroupMeasure", "one weight per matrix");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < mats.size(); ++i) atoms.push_back({mats[i], weights[i]});
    return GroupMeasure(std::move(atoms), seed);
}

py::dict cert_dict(const ExpansionCertificate& c) {
    py::dict d;
    d["N"] = c.N;
    d["C_lower"] = c.C_lower;
    d["C_estimate"] = c.C_estimate;
    d["mode"] = c.mode == CertMode::Exact ? "exact" : "monte_carlo";
    d["witness"] = c.witness;
    d["pass"] = c.pass();
    d["verdict"] = c.verdict();
    return d;
}

}  // namespace

PYBIND11_MODULE(_expwalk, m) {
    m.doc() = "Expanding random walks, lattices and self-affine fractals";

    static py::exception<Error> base(m, "Error");
    static py::exception<DomainError> domain(m, "DomainError", base.ptr());
    static py::exception<ConditioningError> cond(m, "ConditioningError", base.ptr());
    static py::exception<ConvergenceError> conv(m, "ConvergenceError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            py::set_error(domain, e.what());
        } catch (const ConditioningError& e) {
            py::set_error(cond, e.what());
        } catch (const ConvergenceError& e) {
            py::set_error(conv, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def("wedge_power", [](const Mat& g, int k) { return wedge_power(g, k); }, py::arg("g"), py::arg("k"));
    m.def("operator_norms", [](const Mat& g) {
        const auto n = operator_norms(g);
        return py::make_tuple(n.norm, n.inv_norm, n.N);
    });

    py::class_<GroupMeasure>(m, "GroupMeasure")
        .def(py::init(&make_measure), py::arg("matrices"), py::arg("weights") = std::vector<double>{},
             py::arg("seed") = 0)
        .def_property_readonly("dim", &GroupMeasure::dim)
        .def("__len__", &GroupMeasure::size)
        .def("set_profile", [](GroupMeasure& mu, std::vector<double> r, std::vector<double> s) {
            mu.set_profile(ParabolicProfile(WeightPair(std::move(r), std::move(s))));
        });
    m.def("load_measure", &load_measure);

    m.def(
        "expansion_certificate",
        [](const GroupMeasure& mu, const std::string& rep, int N, bool force_mc, std::uint64_t seed) {
            CertificateOptions o;
            o.force_monte_carlo = force_mc;
            o.seed = seed;
            return cert_dict(expansion_certificate(mu, Representation::parse(rep), N, o));
        },
        py::arg("mu"), py::arg("rep") = "std", py::arg("N") = 1, py::arg("force_monte_carlo") = false,
        py::arg("seed") = 0);
    m.def(
        "fk_exponent_estimate",
        [](const GroupMeasure& mu, const Vec& v, int n_steps, int n_trials, std::uint64_t seed) {
            const auto e = fk_exponent_estimate(mu, v, n_steps, n_trials, seed);
            return py::make_tuple(e.mean, e.stderr_);
        },
        py::arg("mu"), py::arg("v"), py::arg("n_steps"), py::arg("n_trials"), py::arg("seed") = 0);
    m.def("expanding_cone_membership", [](const std::vector<int>& blocks, const std::vector<double>& logs) {
        const auto r = expanding_cone_membership(ConeSpec(blocks), CartanVector(logs));
        return py::make_tuple(r.inside, r.tau);
    });

    m.def("shortest_vector", [](const Mat& basis, const std::string& norm) {
        const auto x = lll_reduce(basis);
        const auto s = shortest_vector(x, norm == "sup" ? Norm::Sup : Norm::Euclid);
        return py::make_tuple(s.v, s.length);
    }, py::arg("basis"), py::arg("norm") = "sup");
    m.def("lll_reduce", [](const Mat& basis) { return lll_reduce(basis).reduced(); });
    m.def("siegel_count", [](const Mat& basis, double R) { return siegel_count(lll_reduce(basis), R); });
    m.def("margulis_height", [](const Mat& basis, double eps, double delta) {
        const auto x = lll_reduce(basis);
        return margulis_height(x, HeightSpec::standard(x.dim(), eps, delta));
    }, py::arg("basis"), py::arg("eps") = 0.1, py::arg("delta") = 0.3);

    m.def("kau_factorize", [](const Mat& g, std::vector<double> r, std::vector<double> s) {
        const auto f = kau_factorize(g, ParabolicProfile(WeightPair(std::move(r), std::move(s))));
        return py::make_tuple(f.k, f.t, f.M);
    });

    m.def("admissibility", [](const std::vector<int>& bases) {
        const auto a = admissibility(bases);
        return py::make_tuple(a.ok, a.r, a.failing);
    });
    m.def("sponge_weights", [](const std::vector<int>& bases, const std::vector<std::vector<int>>& pattern) {
        const auto ifs = sponge_builder(bases, pattern);
        return ifs.weightpair->r;
    });
    m.def("coding_sample", [](const std::vector<int>& bases, const std::vector<std::vector<int>>& pattern, long n,
                              std::uint64_t seed) {
        return coding_sample(sponge_builder(bases, pattern, WeightsMode::Custom), n, 1e-15, seed);
    });

    m.def("brute_force_quality", [](const Mat& M, std::vector<double> r, std::vector<double> s, double T) {
        const auto b = brute_force_quality(M, WeightPair(std::move(r), std::move(s)), T);
        return py::make_tuple(b.quality, b.q, b.p);
    });
    m.def("flow_minima", [](const Mat& M, std::vector<double> r, std::vector<double> s, double t_max, double dt) {
        const auto tr = flow_trace(M, WeightPair(std::move(r), std::move(s)), t_max, dt);
        return py::make_tuple(tr.t, tr.minima);
    }, py::arg("M"), py::arg("r"), py::arg("s"), py::arg("t_max"), py::arg("dt") = 0.05);

    m.def("run_config", [](const std::string& text) {
        const auto art = run_in_memory(ExperimentConfig::parse(text));
        return py::make_tuple(art.status, art.summary.dump(), art.data.str());
    });
}
