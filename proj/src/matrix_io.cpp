#include "pathsum/matrix_io.hpp"

#include <fstream>

namespace pathsum {

void MatrixSpec::add_entry(int row, int col, const std::string& source,
                           int force_nonzero) {
    if (row < 0 || row >= n || col < 0 || col >= n)
        throw InputError("entry index out of range");
    int& slot = index_[static_cast<std::size_t>(row) * n + col];
    if (slot >= 0)
        throw InputError("duplicate entry at row " + std::to_string(row + 1) +
                         ", col " + std::to_string(col + 1));
    MatrixEntry e;
    e.row = row;
    e.col = col;
    e.source = source;
    e.tree = expr::parse(source);
    e.force_nonzero = force_nonzero;
    slot = static_cast<int>(entries.size());
    entries.push_back(std::move(e));
}

namespace {

using nlohmann::json;

const json& require_key(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw InputError(std::string(where) + ": missing key \"" + key + "\"");
    return *it;
}

int require_int(const json& v, const char* key, const char* where) {
    if (!v.is_number_integer())
        throw InputError(std::string(where) + ": key \"" + key +
                         "\" must be an integer");
    return v.get<int>();
}

} // namespace

MatrixSpec matrix_from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("matrix file: top level must be an object");

    const json& jn = require_key(doc, "n", "matrix file");
    const int n = require_int(jn, "n", "matrix file");
    if (n < 1) throw InputError("matrix file: key \"n\" must be at least 1");
    if (n > 64) throw InputError("matrix file: key \"n\" is capped at 64");

    const json& ji = require_key(doc, "interval", "matrix file");
    if (!ji.is_array() || ji.size() != 2 || !ji[0].is_number() || !ji[1].is_number())
        throw InputError("matrix file: key \"interval\" must be [t_min, t_max]");
    const double t0 = ji[0].get<double>();
    const double t1 = ji[1].get<double>();
    if (!(t0 < t1))
        throw InputError("matrix file: key \"interval\" needs t_min < t_max");

    MatrixSpec spec(n, t0, t1);

    const json& je = require_key(doc, "entries", "matrix file");
    if (!je.is_array())
        throw InputError("matrix file: key \"entries\" must be an array");

    int idx = 0;
    for (const json& item : je) {
        const std::string where = "entry " + std::to_string(idx);
        if (!item.is_object()) throw InputError(where + ": must be an object");
        const int row = require_int(require_key(item, "row", where.c_str()), "row",
                                    where.c_str());
        const int col = require_int(require_key(item, "col", where.c_str()), "col",
                                    where.c_str());
        if (row < 1 || row > n)
            throw InputError(where + ": key \"row\" out of range 1.." + std::to_string(n));
        if (col < 1 || col > n)
            throw InputError(where + ": key \"col\" out of range 1.." + std::to_string(n));
        const json& jx = require_key(item, "expr", where.c_str());
        if (!jx.is_string())
            throw InputError(where + ": key \"expr\" must be a string");
        int force = -1;
        if (auto it = item.find("force_nonzero"); it != item.end()) {
            if (!it->is_boolean())
                throw InputError(where + ": key \"force_nonzero\" must be a boolean");
            force = it->get<bool>() ? 1 : 0;
        }
        try {
            spec.add_entry(row - 1, col - 1, jx.get<std::string>(), force);
        } catch (const expr::ParseError& pe) {
            throw InputError(where + ": key \"expr\": " + pe.what());
        }
        ++idx;
    }
    return spec;
}

MatrixSpec load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open matrix file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("matrix file " + path + ": " + e.what());
    }
    return matrix_from_json(doc);
}

} // namespace pathsum
