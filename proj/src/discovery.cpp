#include "degcausal/discovery.hpp"

#include "degcausal/error.hpp"

namespace degcausal {

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::StablePc: return "stable-pc";
        case Method::Ges: return "ges";
        case Method::DirectLingam: return "direct-lingam";
        case Method::NotearsLinear: return "notears-linear";
        case Method::NotearsMlp: return "notears-mlp";
        case Method::Granger: return "granger";
    }
    return "unknown";
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods{Method::StablePc,      Method::Ges,        Method::DirectLingam,
                                             Method::NotearsLinear, Method::NotearsMlp, Method::Granger};
    return methods;
}

const std::vector<Method>& non_temporal_methods() {
    static const std::vector<Method> methods{Method::StablePc, Method::Ges, Method::DirectLingam, Method::NotearsLinear,
                                             Method::NotearsMlp};
    return methods;
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (name == to_string(m)) return m;
    throw Error(ErrorKind::EnumeratedChoice,
                "unknown method '" + name + "' (expected stable-pc, ges, direct-lingam, notears-linear, notears-mlp, granger)");
}

void MethodConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::Config, what);
    };
    require(pc.alpha > 0.0 && pc.alpha < 1.0, "stable-pc.alpha must lie in (0,1)");
    require(lingam.edge_threshold >= 0.0, "direct-lingam.edge_threshold must be >= 0");
    require(notears_linear.l1 >= 0.0, "notears-linear.l1 must be >= 0");
    require(notears_linear.max_outer_iter > 0, "notears-linear.max_outer_iter must be > 0");
    require(notears_linear.h_tol > 0.0, "notears-linear.h_tol must be > 0");
    require(notears_linear.rho_max > 0.0, "notears-linear.rho_max must be > 0");
    require(notears_linear.edge_threshold >= 0.0, "notears-linear.edge_threshold must be >= 0");
    require(notears_mlp.l1 >= 0.0 && notears_mlp.l2 >= 0.0, "notears-mlp.l1/l2 must be >= 0");
    require(notears_mlp.max_outer_iter > 0, "notears-mlp.max_outer_iter must be > 0");
    require(notears_mlp.h_tol > 0.0, "notears-mlp.h_tol must be > 0");
    require(notears_mlp.rho_max > 0.0, "notears-mlp.rho_max must be > 0");
    require(notears_mlp.hidden_units > 0, "notears-mlp.hidden_units must be > 0");
    require(notears_mlp.edge_threshold >= 0.0, "notears-mlp.edge_threshold must be >= 0");
    require(granger.max_lag > 0, "granger.max_lag must be > 0");
    require(granger.aic_max_lag > 0, "granger.aic_max_lag must be > 0");
    require(granger.alpha > 0.0 && granger.alpha < 1.0, "granger.alpha must lie in (0,1)");
}

DiscoveryResult discover(Method method, const DataMatrix& m, const MethodConfig& cfg, std::uint64_t seed) {
    switch (method) {
        case Method::StablePc: return stable_pc(m, cfg.pc);
        case Method::Ges: return ges(m, cfg.ges);
        case Method::DirectLingam: return direct_lingam(m, cfg.lingam);
        case Method::NotearsLinear: return notears_linear(m, cfg.notears_linear);
        case Method::NotearsMlp: return notears_mlp(m, cfg.notears_mlp, seed);
        case Method::Granger:
            throw Error(ErrorKind::Input, "granger works on the raw dataset, not on a strategy matrix");
    }
    throw Error(ErrorKind::EnumeratedChoice, "unknown method");
}

DiscoveryResult discover(Method method, const DegradationDataset& d, Strategy strategy, const MethodConfig& cfg,
                         std::uint64_t seed, bool standardize) {
    if (method == Method::Granger) return granger_pairwise(d, cfg.granger);
    return discover(method, build_matrix(d, strategy, standardize), cfg, seed);
}

}  // namespace degcausal
