#include "tdscha/tensor_io.hpp"

#include "tdscha/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tdscha {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw InputError(msg.str());
}

SparseSymTensor& tensor_of(QuarticPES& pes, int order) {
    switch (order) {
    case 2: return pes.phi();
    case 3: return pes.chi();
    default: return pes.psi();
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

PesFile load_pes_text(const std::string& path, std::istream& in) {
    PesFile out;
    std::string line;
    int lineno = 0;
    int dim = -1;
    QuarticPES::Basis basis = QuarticPES::Basis::cartesian;
    double v_ref = 0.0;
    bool have_format = false;
    bool built = false;
    int order = 0; // 0 = outside a section
    std::set<std::array<int, 4>> seen;

    auto ensure_built = [&](int at_line) {
        if (built)
            return;
        if (dim < 1)
            fail(path, at_line, "dim must be declared before any section");
        out.pes = QuarticPES(dim, basis);
        out.pes.set_v_ref(v_ref);
        built = true;
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok))
            continue;

        if (order > 0) {
            if (tok == "end") {
                order = 0;
                continue;
            }
            std::array<int, 4> idx{};
            double value = 0.0;
            std::istringstream entry(line);
            for (int k = 0; k < order; ++k)
                if (!(entry >> idx[k]))
                    fail(path, lineno, "expected " + std::to_string(order) +
                                           " indices and a value");
            if (!(entry >> value))
                fail(path, lineno, "missing value");
            std::string extra;
            if (entry >> extra)
                fail(path, lineno, "trailing tokens after value");
            std::sort(idx.begin(), idx.begin() + order);
            std::array<int, 4> key = idx;
            key[3] = order == 4 ? key[3] : -order; // disambiguate orders
            if (!seen.insert(key).second)
                fail(path, lineno, "duplicate entry for this multi-index");
            try {
                tensor_of(out.pes, order)
                    .set(std::vector<int>(idx.begin(), idx.begin() + order), value);
            } catch (const std::exception& e) {
                fail(path, lineno, e.what());
            }
            continue;
        }

        if (tok == "format") {
            std::string name;
            int version = 0;
            if (!(ls >> name >> version) || name != "tdscha-pes" || version != 1)
                fail(path, lineno, "expected 'format tdscha-pes 1'");
            have_format = true;
        } else if (tok == "dim") {
            if (built)
                fail(path, lineno, "dim must appear before the first section");
            if (!(ls >> dim) || dim < 1)
                fail(path, lineno, "dim must be a positive integer");
        } else if (tok == "basis") {
            if (built)
                fail(path, lineno, "basis must appear before the first section");
            std::string b;
            ls >> b;
            if (b == "cartesian")
                basis = QuarticPES::Basis::cartesian;
            else if (b == "mode")
                basis = QuarticPES::Basis::mode;
            else
                fail(path, lineno, "basis must be 'cartesian' or 'mode'");
        } else if (tok == "unit") {
            std::string kind, value;
            if (!(ls >> kind >> value))
                fail(path, lineno, "expected 'unit <kind> <name>'");
            if (kind == "energy")
                out.energy_unit = value;
            else if (kind == "length")
                out.length_unit = value;
            else
                fail(path, lineno, "unknown unit kind '" + kind + "'");
        } else if (tok == "hbar") {
            if (!(ls >> out.hbar) || !(out.hbar > 0.0))
                fail(path, lineno, "hbar must be positive");
        } else if (tok == "v_ref") {
            if (!(ls >> v_ref))
                fail(path, lineno, "v_ref must be a number");
            if (built)
                out.pes.set_v_ref(v_ref);
        } else if (tok == "order") {
            int k = 0;
            if (!(ls >> k))
                fail(path, lineno, "expected 'order <k>'");
            if (k == 1)
                fail(path, lineno, "order 1 sections are not supported; expand "
                                   "around a stationary point");
            if (k < 2 || k > 4)
                fail(path, lineno, "order must be 2, 3 or 4");
            ensure_built(lineno);
            order = k;
        } else {
            fail(path, lineno, "unknown directive '" + tok + "'");
        }
    }
    if (!have_format)
        fail(path, 1, "missing 'format tdscha-pes 1' header");
    if (order > 0)
        fail(path, lineno, "unterminated section, missing 'end'");
    ensure_built(lineno);
    return out;
}

json rows_of(const SparseSymTensor& t) {
    std::vector<SparseSymTensor::Entry> sorted(t.entries());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.idx < b.idx; });
    json rows = json::array();
    for (const auto& e : sorted) {
        json row = json::array();
        for (int k = 0; k < t.order(); ++k)
            row.push_back(e.idx[k]);
        row.push_back(e.value);
        rows.push_back(row);
    }
    return rows;
}

void load_rows(QuarticPES& pes, int order, const json& rows, const std::string& path,
               const char* name) {
    if (!rows.is_array())
        fail(path, 0, std::string(name) + " must be an array of rows");
    std::set<std::array<int, 4>> seen;
    for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != order + 1)
            fail(path, 0, std::string(name) + " rows need " + std::to_string(order) +
                              " indices and a value");
        std::array<int, 4> idx{};
        for (int k = 0; k < order; ++k) {
            if (!row[k].is_number_integer())
                fail(path, 0, std::string(name) + " indices must be integers");
            idx[k] = row[k].get<int>();
        }
        std::sort(idx.begin(), idx.begin() + order);
        if (!seen.insert(idx).second)
            fail(path, 0, std::string(name) + ": duplicate multi-index");
        try {
            tensor_of(pes, order)
                .set(std::vector<int>(idx.begin(), idx.begin() + order),
                     row[order].get<double>());
        } catch (const std::exception& e) {
            fail(path, 0, e.what());
        }
    }
}

PesFile load_pes_json(const std::string& path, std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    if (j.value("format", "") != "tdscha-pes" || j.value("version", 0) != 1)
        fail(path, 0, "expected format tdscha-pes version 1");
    const int dim = j.value("dim", 0);
    if (dim < 1)
        fail(path, 0, "dim must be a positive integer");
    const std::string b = j.value("basis", "cartesian");
    if (b != "cartesian" && b != "mode")
        fail(path, 0, "basis must be 'cartesian' or 'mode'");

    PesFile out;
    out.pes = QuarticPES(dim, b == "mode" ? QuarticPES::Basis::mode
                                          : QuarticPES::Basis::cartesian);
    out.pes.set_v_ref(j.value("v_ref", 0.0));
    out.hbar = j.value("hbar", 0.0);
    if (j.contains("units")) {
        out.energy_unit = j["units"].value("energy", out.energy_unit);
        out.length_unit = j["units"].value("length", out.length_unit);
    }
    if (j.contains("phi"))
        load_rows(out.pes, 2, j["phi"], path, "phi");
    if (j.contains("chi"))
        load_rows(out.pes, 3, j["chi"], path, "chi");
    if (j.contains("psi"))
        load_rows(out.pes, 4, j["psi"], path, "psi");
    return out;
}

} // namespace

PesFile load_pes(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open surface file: " + path);
    int c = in.peek();
    while (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
        in.get();
        c = in.peek();
    }
    if (c == '{')
        return load_pes_json(path, in);
    return load_pes_text(path, in);
}

void save_pes(const PesFile& file, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write surface file: " + path);
    out << "format tdscha-pes 1\n";
    out << "dim " << file.pes.dim() << "\n";
    out << "basis "
        << (file.pes.basis() == QuarticPES::Basis::mode ? "mode" : "cartesian") << "\n";
    out << "unit energy " << file.energy_unit << "\n";
    out << "unit length " << file.length_unit << "\n";
    if (file.hbar > 0.0)
        out << "hbar " << fmt(file.hbar) << "\n";
    out << "v_ref " << fmt(file.pes.v_ref()) << "\n";
    const SparseSymTensor* tensors[] = {&file.pes.phi(), &file.pes.chi(),
                                        &file.pes.psi()};
    for (const SparseSymTensor* t : tensors) {
        if (t->nonzeros() == 0)
            continue;
        out << "order " << t->order() << "\n";
        std::vector<SparseSymTensor::Entry> sorted(t->entries());
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.idx < b.idx; });
        for (const auto& e : sorted) {
            for (int k = 0; k < t->order(); ++k)
                out << e.idx[k] << " ";
            out << fmt(e.value) << "\n";
        }
        out << "end\n";
    }
    if (!out)
        throw InputError("write failed: " + path);
}

void save_pes_json(const PesFile& file, const std::string& path) {
    json j;
    j["format"] = "tdscha-pes";
    j["version"] = 1;
    j["dim"] = file.pes.dim();
    j["basis"] = file.pes.basis() == QuarticPES::Basis::mode ? "mode" : "cartesian";
    j["units"] = {{"energy", file.energy_unit}, {"length", file.length_unit}};
    if (file.hbar > 0.0)
        j["hbar"] = file.hbar;
    j["v_ref"] = file.pes.v_ref();
    j["phi"] = rows_of(file.pes.phi());
    j["chi"] = rows_of(file.pes.chi());
    j["psi"] = rows_of(file.pes.psi());
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write surface file: " + path);
    out << j.dump(2) << "\n";
    if (!out)
        throw InputError("write failed: " + path);
}

} // namespace tdscha
