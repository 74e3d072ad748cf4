#include "degcausal/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "degcausal/error.hpp"
#include "degcausal/io.hpp"
#include "degcausal/rng.hpp"

namespace degcausal {

std::vector<CmapssRecord> parse_cmapss_records(const std::string& text) {
    std::vector<CmapssRecord> out;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> fields;
        std::string f;
        while (ls >> f) fields.push_back(f);
        if (fields.empty()) continue;
        if (fields.size() != 26) {
            std::ostringstream msg;
            msg << "C-MAPSS line " << line_no << ": expected 26 columns, found " << fields.size();
            throw Error(ErrorKind::Parse, msg.str());
        }
        std::vector<double> v(26);
        for (std::size_t c = 0; c < 26; ++c) {
            try {
                std::size_t used = 0;
                v[c] = std::stod(fields[c], &used);
                if (used != fields[c].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                std::ostringstream msg;
                msg << "C-MAPSS line " << line_no << ", column " << c + 1 << ": '" << fields[c] << "' is not a number";
                throw Error(ErrorKind::Parse, msg.str());
            }
        }
        CmapssRecord r;
        if (v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
            std::ostringstream msg;
            msg << "C-MAPSS line " << line_no << ": unit and cycle must be integers";
            throw Error(ErrorKind::Parse, msg.str());
        }
        r.unit = static_cast<int>(v[0]);
        r.cycle = static_cast<int>(v[1]);
        for (int s = 0; s < 3; ++s) r.settings[static_cast<std::size_t>(s)] = v[static_cast<std::size_t>(2 + s)];
        for (int s = 0; s < 21; ++s) r.sensors[static_cast<std::size_t>(s)] = v[static_cast<std::size_t>(5 + s)];
        out.push_back(r);
    }
    return out;
}

const std::array<int, 14>& cmapss_kept_sensors() {
    static const std::array<int, 14> kept{2, 3, 4, 7, 8, 9, 11, 12, 13, 14, 15, 17, 20, 21};
    return kept;
}

const std::array<int, 7>& cmapss_constant_sensors() {
    static const std::array<int, 7> constant{1, 5, 6, 10, 16, 18, 19};
    return constant;
}

const std::vector<std::string>& cmapss_labels() {
    static const std::vector<std::string> labels{"T24", "T30", "T50", "P30",  "Nf",      "Nc",  "Ps30",
                                                 "phi", "NRf", "NRc", "BPR",  "htBleed", "W31", "W32"};
    return labels;
}

DegradationDataset cmapss_dataset(const std::vector<CmapssRecord>& records) {
    if (records.empty()) throw Error(ErrorKind::Input, "C-MAPSS: no records");
    std::vector<int> order;
    std::map<int, std::vector<const CmapssRecord*>> by_unit;
    for (const auto& r : records) {
        if (!by_unit.count(r.unit)) order.push_back(r.unit);
        by_unit[r.unit].push_back(&r);
    }
    const auto& kept = cmapss_kept_sensors();
    std::vector<UnitSeries> units;
    for (int id : order) {
        const auto& rows = by_unit[id];
        for (std::size_t c = 0; c < rows.size(); ++c) {
            if (rows[c]->cycle != static_cast<int>(c) + 1) {
                std::ostringstream msg;
                msg << "C-MAPSS unit " << id << ": cycles are not consecutive from 1 (found " << rows[c]->cycle
                    << " at position " << c + 1 << ")";
                throw Error(ErrorKind::Parse, msg.str());
            }
        }
        for (int s : cmapss_constant_sensors()) {
            double mean = 0.0;
            for (const auto* r : rows) mean += r->sensors[static_cast<std::size_t>(s - 1)];
            mean /= static_cast<double>(rows.size());
            double ss = 0.0;
            for (const auto* r : rows) {
                const double d = r->sensors[static_cast<std::size_t>(s - 1)] - mean;
                ss += d * d;
            }
            const double sd = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
            if (!(sd < 1e-9 * std::abs(mean)) && sd > 0.0) {
                std::ostringstream msg;
                msg << "C-MAPSS unit " << id << ": excluded sensor " << s << " is not constant (sd " << sd << ", mean "
                    << mean << ")";
                throw Error(ErrorKind::MappingValidation, msg.str());
            }
        }
        UnitSeries u;
        u.id = std::to_string(id);
        u.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kept.size()));
        for (std::size_t c = 0; c < rows.size(); ++c) {
            u.times.push_back(static_cast<double>(rows[c]->cycle));
            for (std::size_t s = 0; s < kept.size(); ++s)
                u.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) =
                    rows[c]->sensors[static_cast<std::size_t>(kept[s] - 1)];
        }
        units.push_back(std::move(u));
    }
    return DegradationDataset(cmapss_labels(), std::move(units));
}

DegradationDataset parse_cmapss_text(const std::string& text) { return cmapss_dataset(parse_cmapss_records(text)); }

DegradationDataset parse_cmapss(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Io, "C-MAPSS file not found: '" + path.string() + "'");
    return parse_cmapss_text(read_text_file(path));
}

DegradationDataset extract_last_window(const DegradationDataset& d, int w) {
    if (w < 1) throw Error(ErrorKind::Window, "window length must be >= 1");
    std::vector<UnitSeries> units;
    for (const auto& u : d.units()) {
        const auto len = u.values.rows();
        if (len < w) {
            std::ostringstream msg;
            msg << "unit " << u.id << " has " << len << " measurements, shorter than the window of " << w;
            throw Error(ErrorKind::Window, msg.str());
        }
        UnitSeries s;
        s.id = u.id;
        s.values = u.values.bottomRows(w);
        for (int t = 1; t <= w; ++t) s.times.push_back(static_cast<double>(t));
        units.push_back(std::move(s));
    }
    return DegradationDataset(d.labels(), std::move(units), d.seed());
}

std::vector<DegradationDataset> bootstrap_units(const DegradationDataset& d, double fraction, int repeats,
                                                std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorKind::Config, "bootstrap fraction must lie in (0, 1]");
    if (repeats < 1) throw Error(ErrorKind::Config, "bootstrap repeats must be >= 1");
    if (d.n() < 2) throw Error(ErrorKind::Config, "bootstrap needs at least two units");
    const int take = static_cast<int>(std::floor(fraction * d.n() + 1e-12));
    if (take < 1) throw Error(ErrorKind::Config, "bootstrap fraction selects no units");

    std::vector<DegradationDataset> out;
    for (int rep = 0; rep < repeats; ++rep) {
        Rng rng = make_rng(seed, {static_cast<std::uint64_t>(rep)});
        std::vector<int> idx(static_cast<std::size_t>(d.n()));
        std::iota(idx.begin(), idx.end(), 0);
        // Partial Fisher-Yates: the first `take` slots are a uniform draw without replacement.
        for (int i = 0; i < take; ++i) {
            std::uniform_int_distribution<int> pick(i, d.n() - 1);
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
        }
        idx.resize(static_cast<std::size_t>(take));
        std::sort(idx.begin(), idx.end());
        out.push_back(d.select_units(idx));
    }
    return out;
}

CausalGraph majority_vote(const std::vector<CausalGraph>& graphs) {
    if (graphs.empty()) throw Error(ErrorKind::Metric, "majority vote over no graphs");
    const int k = graphs.front().k();
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 0));
    for (const auto& g : graphs) {
        if (g.k() != k) throw Error(ErrorKind::Comparison, "majority vote over graphs of different size");
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += g.at(i, j);
    }
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                2 * counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > static_cast<int>(graphs.size());
    return CausalGraph(std::move(adj), graphs.front().labels());
}

std::vector<CmapssMethodResult> run_cmapss_case(const DegradationDataset& d, const CmapssCaseConfig& cfg,
                                                std::uint64_t seed) {
    cfg.method_config.validate();
    const DegradationDataset window = extract_last_window(d, cfg.window);
    const std::vector<DegradationDataset> reps = bootstrap_units(window, cfg.fraction, cfg.repeats, seed);
    std::vector<CmapssMethodResult> out;
    for (Method m : cfg.methods) {
        CmapssMethodResult res;
        res.method = m;
        res.replicates.resize(reps.size());
        res.errors.resize(reps.size());
        const auto count = static_cast<std::ptrdiff_t>(reps.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t r = 0; r < count; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            try {
                res.replicates[ur] = discover(m, reps[ur], cfg.strategy, cfg.method_config,
                                              derive_seed(seed, {static_cast<std::uint64_t>(m) + 1, ur}), cfg.standardize)
                                         .graph;
            } catch (const std::exception& e) {
                res.errors[ur] = e.what();
                res.replicates[ur] = CausalGraph(window.k(), window.labels());
            }
        }
        std::vector<CausalGraph> ok;
        std::vector<std::string> errors;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            if (res.errors[r].empty())
                ok.push_back(res.replicates[r]);
            else
                errors.push_back(res.errors[r]);
        }
        res.errors = std::move(errors);
        res.aggregated = ok.empty() ? CausalGraph(window.k(), window.labels()) : majority_vote(ok);
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace degcausal
