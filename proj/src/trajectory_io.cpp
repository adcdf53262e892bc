#include "tdscha/trajectory_io.hpp"

#include "tdscha/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tdscha {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string mode_name(const ModeBasis& basis, int mu) {
    if (mu < static_cast<int>(basis.labels.size()) && !basis.labels[mu].empty())
        return basis.labels[mu];
    return std::to_string(mu);
}

std::vector<int> resolve_modes(const std::vector<int>& obs_modes, int n) {
    if (!obs_modes.empty())
        return obs_modes;
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i)
        all[i] = i;
    return all;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j)
            row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* name) {
    if (!rows.is_array() || rows.empty())
        throw InputError(std::string("snapshot field ") + name + " must be a matrix");
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd M(n, static_cast<int>(rows[0].size()));
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != M.cols())
            throw InputError(std::string("snapshot field ") + name + " is ragged");
        for (int j = 0; j < M.cols(); ++j)
            M(i, j) = rows[i][j].get<double>();
    }
    return M;
}

struct Series {
    std::vector<double> t, r_fe, a_fe, r_ir, unc;
};

TrajectorySummary reduce(const Series& s, const SummarizeOptions& opts) {
    if (!(opts.x0 > 0.0))
        throw InputError("summary needs a positive displacement scale");
    if (s.t.size() < 2)
        throw InputError("trajectory too short to summarize");
    const std::size_t n = s.t.size();
    TrajectorySummary out;
    out.min_a_fe = s.a_fe.empty() ? 0.0 : s.a_fe[0];
    for (double a : s.a_fe)
        out.min_a_fe = std::min(out.min_a_fe, a);
    for (double r : s.r_ir)
        out.max_r_ir = std::max(out.max_r_ir, std::abs(r));
    out.min_uncertainty = s.unc.empty() ? 0.0 : s.unc[0];
    for (double u : s.unc)
        out.min_uncertainty = std::min(out.min_uncertainty, u);
    out.final_r_fe = s.r_fe.back();

    const double thr = 0.5 * opts.x0;
    for (std::size_t i = 0; i < n && !out.transition; ++i) {
        if (std::abs(s.r_fe[i]) <= thr)
            continue;
        // the whole sustain window must exist and stay above threshold
        if (s.t[i] + opts.sustain > s.t[n - 1])
            break;
        bool held = true;
        for (std::size_t j = i; j < n && s.t[j] <= s.t[i] + opts.sustain; ++j)
            if (std::abs(s.r_fe[j]) <= thr) {
                held = false;
                break;
            }
        if (held) {
            out.transition = true;
            out.t_transition = s.t[i];
        }
    }

    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(s.r_fe[i]) > std::abs(s.r_fe[peak]))
            peak = i;
    if (std::abs(s.r_fe[peak]) > 0.25 * opts.x0) {
        for (std::size_t j = peak; j < n; ++j) {
            if (std::abs(s.r_fe[j]) >= 0.25 * opts.x0)
                continue;
            bool stayed = true;
            for (std::size_t k = j; k < n; ++k)
                if (std::abs(s.r_fe[k]) > thr) {
                    stayed = false;
                    break;
                }
            if (stayed) {
                out.relaxed_back = true;
                out.t_relax_back = s.t[j];
            }
            break;
        }
    }
    return out;
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ModeBasis& basis, const std::vector<int>& obs_modes) {
    const std::vector<int> modes = resolve_modes(obs_modes, basis.n_modes());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write trajectory file: " + path);

    out << "t";
    for (const char* prefix : {"R_", "A_", "B_"})
        for (int mu : modes)
            out << "," << prefix << mode_name(basis, mu);
    out << ",f_harmonic,f_anharmonic,f_quantum,f_total,kinetic,potential,"
           "total_energy,uncertainty_min\n";

    for (const ObsRecord& rec : traj.obs) {
        if (rec.R_mode.size() != modes.size())
            throw InputError("observable record does not match the mode list");
        out << fmt(rec.t);
        for (double v : rec.R_mode)
            out << "," << fmt(v);
        for (double v : rec.A_mode)
            out << "," << fmt(v);
        for (double v : rec.B_mode)
            out << "," << fmt(v);
        out << "," << fmt(rec.f_harmonic) << "," << fmt(rec.f_anharmonic) << ","
            << fmt(rec.f_quantum) << "," << fmt(rec.f_total) << ","
            << fmt(rec.kinetic) << "," << fmt(rec.potential) << ","
            << fmt(rec.total_energy) << "," << fmt(rec.unc_min) << "\n";
    }
    if (!out)
        throw InputError("write failed: " + path);
}

void write_snapshots_jsonl(const std::string& path,
                           const std::vector<GaussianState>& snapshots) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write snapshot file: " + path);
    for (const GaussianState& s : snapshots) {
        json j;
        j["t"] = s.t;
        j["R"] = std::vector<double>(s.R.data(), s.R.data() + s.R.size());
        j["P"] = std::vector<double>(s.P.data(), s.P.data() + s.P.size());
        j["A"] = matrix_to_json(s.A);
        j["B"] = matrix_to_json(s.B);
        j["G"] = matrix_to_json(s.G);
        out << j.dump() << "\n";
    }
    if (!out)
        throw InputError("write failed: " + path);
}

std::vector<GaussianState> load_snapshots_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open snapshot file: " + path);
    std::vector<GaussianState> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        GaussianState s;
        s.t = j.value("t", 0.0);
        const auto r = j.at("R").get<std::vector<double>>();
        const auto p = j.at("P").get<std::vector<double>>();
        s.R = Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
        s.P = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
        s.A = matrix_from_json(j.at("A"), "A");
        s.B = matrix_from_json(j.at("B"), "B");
        s.G = matrix_from_json(j.at("G"), "G");
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

TrajectorySummary summarize_records(const std::vector<ObsRecord>& obs,
                                    const ModeBasis& basis,
                                    const std::vector<int>& obs_modes,
                                    const SummarizeOptions& opts) {
    const std::vector<int> modes = resolve_modes(obs_modes, basis.n_modes());
    int fe = -1, ir = -1;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (mode_name(basis, modes[k]) == opts.fe_label)
            fe = static_cast<int>(k);
        if (mode_name(basis, modes[k]) == opts.ir_label)
            ir = static_cast<int>(k);
    }
    if (fe < 0)
        throw InputError("soft mode '" + opts.fe_label + "' is not observed");
    Series s;
    for (const ObsRecord& rec : obs) {
        s.t.push_back(rec.t);
        s.r_fe.push_back(rec.R_mode[fe]);
        s.a_fe.push_back(rec.A_mode[fe]);
        if (ir >= 0)
            s.r_ir.push_back(rec.R_mode[ir]);
        s.unc.push_back(rec.unc_min);
    }
    return reduce(s, opts);
}

TrajectorySummary summarize_csv(const std::string& path,
                                const SummarizeOptions& opts) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open trajectory file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw InputError(path + ": empty trajectory file");

    auto split = [](const std::string& text) {
        std::vector<std::string> cells;
        std::istringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        return cells;
    };
    const std::vector<std::string> header = split(line);
    int c_t = -1, c_rfe = -1, c_afe = -1, c_rir = -1, c_unc = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& h = header[i];
        if (h == "t")
            c_t = static_cast<int>(i);
        else if (h == "R_" + opts.fe_label)
            c_rfe = static_cast<int>(i);
        else if (h == "A_" + opts.fe_label)
            c_afe = static_cast<int>(i);
        else if (h == "R_" + opts.ir_label)
            c_rir = static_cast<int>(i);
        else if (h == "uncertainty_min")
            c_unc = static_cast<int>(i);
    }
    if (c_t < 0 || c_rfe < 0)
        throw InputError(path + ": missing t or R_" + opts.fe_label + " column");

    Series s;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size())
            throw InputError(path + ":" + std::to_string(lineno) +
                             ": wrong column count");
        auto num = [&](int c) { return std::strtod(cells[c].c_str(), nullptr); };
        s.t.push_back(num(c_t));
        s.r_fe.push_back(num(c_rfe));
        if (c_afe >= 0)
            s.a_fe.push_back(num(c_afe));
        if (c_rir >= 0)
            s.r_ir.push_back(num(c_rir));
        if (c_unc >= 0)
            s.unc.push_back(num(c_unc));
    }
    return reduce(s, opts);
}

} // namespace tdscha
