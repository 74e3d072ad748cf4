#include "degcausal/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "degcausal/error.hpp"

namespace degcausal {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, int line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        std::ostringstream msg;
        msg << "line " << line << ": '" << s << "' is not a number";
        throw Error(ErrorKind::Parse, msg.str());
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorKind::Config, where + ": expected a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw Error(ErrorKind::Config, where + ": unknown key '" + key + "'");
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Config, where + "." + key + ": wrong type");
    }
}

}  // namespace

json graph_to_json(const CausalGraph& g) {
    json adj = json::array();
    for (int i = 0; i < g.k(); ++i) {
        json row = json::array();
        for (int j = 0; j < g.k(); ++j) row.push_back(g.at(i, j));
        adj.push_back(row);
    }
    return json{{"labels", g.labels()}, {"adj", adj}};
}

CausalGraph graph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("adj")) throw Error(ErrorKind::Parse, "graph JSON: missing \"adj\"");
    std::vector<std::vector<int>> adj;
    std::vector<std::string> labels;
    try {
        adj = j.at("adj").get<std::vector<std::vector<int>>>();
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("graph JSON: ") + e.what());
    }
    return CausalGraph(std::move(adj), std::move(labels));
}

json system_spec_to_json(const SystemSpec& s) {
    json params = json::array();
    for (const auto& p : s.params)
        params.push_back({{"mu_x0", p.mu_x0},
                          {"sigma_x0", p.sigma_x0},
                          {"mu_a", p.mu_a},
                          {"v_a", p.v_a},
                          {"sigma", p.sigma},
                          {"sigma_eps", p.sigma_eps},
                          {"gamma", p.gamma}});
    json edges = json::array();
    for (const auto& e : s.edges)
        edges.push_back({{"parent", e.parent}, {"child", e.child}, {"alpha", e.alpha}, {"beta", e.beta}});
    return json{{"params", params},
                {"edges", edges},
                {"dt", s.dt},
                {"m", s.m},
                {"labels", s.labels},
                {"coupling", s.coupling == CouplingInput::Latent ? "latent" : "observed"}};
}

SystemSpec system_spec_from_json(const json& j) {
    const std::string where = "system";
    reject_unknown_keys(j, {"params", "edges", "dt", "m", "labels", "coupling"}, where);
    SystemSpec s;
    if (!j.contains("params") || !j.at("params").is_array())
        throw Error(ErrorKind::Config, "system.params: required array");
    for (std::size_t i = 0; i < j.at("params").size(); ++i) {
        const json& p = j.at("params")[i];
        const std::string pw = where + ".params[" + std::to_string(i) + "]";
        reject_unknown_keys(p, {"mu_x0", "sigma_x0", "mu_a", "v_a", "sigma", "sigma_eps", "gamma"}, pw);
        WienerParams w;
        read_field(p, "mu_x0", w.mu_x0, pw);
        read_field(p, "sigma_x0", w.sigma_x0, pw);
        read_field(p, "mu_a", w.mu_a, pw);
        read_field(p, "v_a", w.v_a, pw);
        read_field(p, "sigma", w.sigma, pw);
        read_field(p, "sigma_eps", w.sigma_eps, pw);
        read_field(p, "gamma", w.gamma, pw);
        s.params.push_back(w);
    }
    if (j.contains("edges")) {
        if (!j.at("edges").is_array()) throw Error(ErrorKind::Config, "system.edges: expected an array");
        for (std::size_t i = 0; i < j.at("edges").size(); ++i) {
            const json& e = j.at("edges")[i];
            const std::string ew = where + ".edges[" + std::to_string(i) + "]";
            reject_unknown_keys(e, {"parent", "child", "alpha", "beta"}, ew);
            if (!e.contains("parent") || !e.contains("child"))
                throw Error(ErrorKind::Config, ew + ": parent and child are required");
            CausalEdgeFunction f;
            read_field(e, "parent", f.parent, ew);
            read_field(e, "child", f.child, ew);
            read_field(e, "alpha", f.alpha, ew);
            read_field(e, "beta", f.beta, ew);
            s.edges.push_back(f);
        }
    }
    read_field(j, "dt", s.dt, where);
    read_field(j, "m", s.m, where);
    read_field(j, "labels", s.labels, where);
    if (j.contains("coupling")) {
        std::string c;
        read_field(j, "coupling", c, where);
        if (c == "latent")
            s.coupling = CouplingInput::Latent;
        else if (c == "observed")
            s.coupling = CouplingInput::Observed;
        else
            throw Error(ErrorKind::EnumeratedChoice, "system.coupling: expected latent or observed, got '" + c + "'");
    }
    if (s.labels.empty()) s.labels = default_labels(s.k());
    s.validate();
    return s;
}

std::string dataset_to_csv(const DegradationDataset& d) {
    std::ostringstream os;
    os << "unit,time";
    for (const auto& l : d.labels()) os << ',' << l;
    os << '\n';
    for (const auto& u : d.units()) {
        if (u.id.find_first_of(",\n\r") != std::string::npos)
            throw Error(ErrorKind::Input, "unit id '" + u.id + "' cannot be written to CSV");
        for (Eigen::Index r = 0; r < u.values.rows(); ++r) {
            os << u.id << ',' << format_double(u.times[static_cast<std::size_t>(r)]);
            for (Eigen::Index c = 0; c < u.values.cols(); ++c) os << ',' << format_double(u.values(r, c));
            os << '\n';
        }
    }
    return os.str();
}

DegradationDataset dataset_from_csv(const std::string& text) {
    const std::vector<std::string> lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorKind::Parse, "dataset CSV: empty input");
    const std::vector<std::string> header = split_csv(lines[0]);
    if (header.size() < 3 || header[0] != "unit" || header[1] != "time")
        throw Error(ErrorKind::Parse, "line 1: dataset header must start with unit,time and name at least one parameter");
    const std::vector<std::string> labels(header.begin() + 2, header.end());
    const std::size_t k = labels.size();

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::vector<double>>> rows;
    std::map<std::string, std::vector<double>> times;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const int line_no = static_cast<int>(ln) + 1;
        const std::vector<std::string> cells = split_csv(lines[ln]);
        if (cells.size() != k + 2) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << k + 2 << " fields, found " << cells.size();
            throw Error(ErrorKind::Parse, msg.str());
        }
        const std::string& id = cells[0];
        if (!rows.count(id)) order.push_back(id);
        times[id].push_back(parse_double(cells[1], line_no));
        std::vector<double> v(k);
        for (std::size_t c = 0; c < k; ++c) v[c] = parse_double(cells[c + 2], line_no);
        rows[id].push_back(std::move(v));
    }
    std::vector<UnitSeries> units;
    for (const auto& id : order) {
        UnitSeries u;
        u.id = id;
        u.times = times[id];
        const auto& r = rows[id];
        u.values.resize(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t c = 0; c < k; ++c) u.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = r[i][c];
        units.push_back(std::move(u));
    }
    return DegradationDataset(labels, std::move(units));
}

std::string matrix_to_csv(const DataMatrix& m) {
    std::ostringstream os;
    for (std::size_t c = 0; c < m.labels.size(); ++c) os << (c ? "," : "") << m.labels[c];
    os << '\n';
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) os << (c ? "," : "") << format_double(m.values(r, c));
        os << '\n';
    }
    return os.str();
}

json matrix_metadata(const DataMatrix& m) {
    return json{{"strategy", to_string(m.strategy)}, {"rows", m.rows()}, {"cols", m.cols()}, {"labels", m.labels}};
}

DataMatrix matrix_from_csv(const std::string& text, const json& metadata) {
    const std::vector<std::string> lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorKind::Parse, "matrix CSV: empty input");
    DataMatrix m;
    m.labels = split_csv(lines[0]);
    try {
        m.strategy = parse_strategy(metadata.at("strategy").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("matrix metadata: ") + e.what());
    }
    const auto k = static_cast<Eigen::Index>(m.labels.size());
    m.values.resize(static_cast<Eigen::Index>(lines.size() - 1), k);
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const std::vector<std::string> cells = split_csv(lines[ln]);
        if (static_cast<Eigen::Index>(cells.size()) != k) {
            std::ostringstream msg;
            msg << "line " << ln + 1 << ": expected " << k << " fields, found " << cells.size();
            throw Error(ErrorKind::Parse, msg.str());
        }
        for (Eigen::Index c = 0; c < k; ++c)
            m.values(static_cast<Eigen::Index>(ln - 1), c) = parse_double(cells[static_cast<std::size_t>(c)], static_cast<int>(ln) + 1);
    }
    if (metadata.contains("labels") && metadata.at("labels").get<std::vector<std::string>>() != m.labels)
        throw Error(ErrorKind::Parse, "matrix CSV header does not match metadata labels");
    return m;
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + p.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + p.string() + "' for writing");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write to '" + p.string() + "' failed");
}

}  // namespace degcausal
