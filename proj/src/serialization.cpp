#include "qbclab/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qbclab/errors.hpp"

namespace qbclab {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw validation_error(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw validation_error(where + ": missing field '" + key + "'");
    return *it;
}

std::size_t require_size(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw validation_error(where + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

double require_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw validation_error(where + ": expected a number");
    return j.get<double>();
}

json matrix_to_json(const Operator& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Operator matrix_from_json(const json& j, std::size_t dim, const std::string& where) {
    if (!j.is_array() || j.size() != dim)
        throw validation_error(where + ": expected " + std::to_string(dim) + " matrix rows");
    Operator m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const json& row = j[i];
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != dim)
            throw validation_error(row_where + ": expected " + std::to_string(dim) + " entries");
        for (std::size_t k = 0; k < dim; ++k) {
            const json& cell = row[k];
            const std::string cell_where = row_where + "[" + std::to_string(k) + "]";
            if (!cell.is_array() || cell.size() != 2)
                throw validation_error(cell_where + ": expected an [re, im] pair");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                Complex(require_number(cell[0], cell_where), require_number(cell[1], cell_where));
        }
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw validation_error(where + ": expected a non-empty array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) =
            require_number(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

json rows_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        out.push_back(vector_to_json(m.row(i).transpose()));
    return out;
}

Eigen::MatrixXd rows_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw validation_error(where + ": expected a non-empty array of rows");
    Eigen::MatrixXd m;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Eigen::VectorXd row =
            vector_from_json(j[i], where + "[" + std::to_string(i) + "]");
        if (i == 0)
            m.resize(static_cast<Eigen::Index>(j.size()), row.size());
        else if (row.size() != m.cols())
            throw validation_error(where + ": ragged rows");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

}  // namespace

nlohmann::json channel_to_json(const CqqBroadcastChannel& w) {
    json j;
    j["alphabet"] = w.alphabet();
    j["dims"] = json::array({w.dim_b, w.dim_e});
    json outputs = json::array();
    for (const auto& s : w.outputs) outputs.push_back(matrix_to_json(s.mat));
    j["outputs"] = std::move(outputs);
    return j;
}

CqqBroadcastChannel channel_from_json(const nlohmann::json& j, const std::string& where) {
    const std::size_t alphabet = require_size(require_field(j, "alphabet", where),
                                              where + ".alphabet");
    const json& dims = require_field(j, "dims", where);
    if (!dims.is_array() || dims.size() != 2)
        throw validation_error(where + ".dims: expected [dim_b, dim_e]");
    const std::size_t dim_b = require_size(dims[0], where + ".dims[0]");
    const std::size_t dim_e = require_size(dims[1], where + ".dims[1]");
    if (dim_b == 0 || dim_e == 0) throw validation_error(where + ".dims: zero dimension");

    const json& outputs = require_field(j, "outputs", where);
    if (!outputs.is_array() || outputs.size() != alphabet)
        throw validation_error(where + ".outputs: expected one state per letter");
    std::vector<DensityOperator> states;
    states.reserve(alphabet);
    for (std::size_t x = 0; x < alphabet; ++x) {
        const std::string sw = where + ".outputs[" + std::to_string(x) + "]";
        Operator m = matrix_from_json(outputs[x], dim_b * dim_e, sw);
        try {
            states.push_back(DensityOperator::validated(std::move(m)));
        } catch (const validation_error& e) {
            throw validation_error(sw + ": " + e.what());
        }
    }
    try {
        return CqqBroadcastChannel::validated(dim_b, dim_e, std::move(states));
    } catch (const validation_error& e) {
        throw validation_error(where + ": " + e.what());
    }
}

nlohmann::json compound_to_json(const CompoundSet& set) {
    json j;
    json members = json::array();
    for (const auto& m : set.members) members.push_back(channel_to_json(m));
    j["members"] = std::move(members);
    if (set.net) {
        j["net"] = json{{"tau", set.net->tau}, {"seed", set.net->seed}};
    }
    return j;
}

CompoundSet compound_from_json(const nlohmann::json& j) {
    const json& members = require_field(j, "members", "compound");
    if (!members.is_array() || members.empty())
        throw validation_error("compound.members: expected a non-empty array");
    CompoundSet set;
    for (std::size_t i = 0; i < members.size(); ++i)
        set.members.push_back(
            channel_from_json(members[i], "compound.members[" + std::to_string(i) + "]"));
    for (std::size_t i = 1; i < set.members.size(); ++i) {
        if (set.members[i].alphabet() != set.members[0].alphabet() ||
            set.members[i].dim_b != set.members[0].dim_b ||
            set.members[i].dim_e != set.members[0].dim_e)
            throw validation_error("compound.members[" + std::to_string(i) +
                                   "]: shape differs from members[0]");
    }
    if (j.contains("net")) {
        const json& net = j["net"];
        NetProvenance p;
        p.tau = require_number(require_field(net, "tau", "compound.net"), "compound.net.tau");
        if (p.tau <= 0.0) throw validation_error("compound.net.tau: must be positive");
        const json& seed = require_field(net, "seed", "compound.net");
        if (!seed.is_number_unsigned())
            throw validation_error("compound.net.seed: expected an unsigned integer");
        p.seed = seed.get<std::uint64_t>();
        set.net = p;
    }
    return set;
}

nlohmann::json input_to_json(const FactorizedInput& input) {
    json j;
    j["l"] = input.l;
    j["alphabet"] = input.alphabet_x;
    j["q"] = vector_to_json(input.q);
    j["r"] = rows_to_json(input.r);
    j["t"] = rows_to_json(input.t);
    return j;
}

FactorizedInput input_from_json(const nlohmann::json& j) {
    const json& jl = require_field(j, "l", "input");
    if (!jl.is_number_integer() || jl.get<std::int64_t>() < 1)
        throw validation_error("input.l: expected a positive integer");
    const std::size_t alphabet = require_size(require_field(j, "alphabet", "input"),
                                              "input.alphabet");
    Eigen::VectorXd q = vector_from_json(require_field(j, "q", "input"), "input.q");
    Eigen::MatrixXd r = rows_from_json(require_field(j, "r", "input"), "input.r");
    Eigen::MatrixXd t = rows_from_json(require_field(j, "t", "input"), "input.t");
    try {
        return FactorizedInput::validated(static_cast<int>(jl.get<std::int64_t>()), alphabet,
                                          std::move(q), std::move(r), std::move(t));
    } catch (const validation_error& e) {
        throw validation_error(std::string("input: ") + e.what());
    } catch (const dimension_error& e) {
        throw validation_error(std::string("input: ") + e.what());
    }
}

namespace {

json parse_file(const std::string& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error(path + ": " + e.what());
    }
}

}  // namespace

CompoundSet load_compound(const std::string& path) {
    try {
        return compound_from_json(parse_file(path));
    } catch (const validation_error& e) {
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw validation_error(path + ": " + msg);
    }
}

void save_compound(const CompoundSet& set, const std::string& path) {
    write_text(path, canonical_dump(compound_to_json(set)));
}

FactorizedInput load_input(const std::string& path) {
    try {
        return input_from_json(parse_file(path));
    } catch (const validation_error& e) {
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw validation_error(path + ": " + msg);
    }
}

void save_input(const FactorizedInput& input, const std::string& path) {
    write_text(path, canonical_dump(input_to_json(input)));
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error(path + ": cannot open for writing");
    out << content;
    if (!out) throw validation_error(path + ": write failed");
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(columns.size()) {
    if (columns.empty()) throw validation_error("CsvWriter: no columns");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += columns[i];
    }
    buf_ += '\n';
}

CsvWriter& CsvWriter::num(double v) { return text(format_double(v)); }

CsvWriter& CsvWriter::integer(std::int64_t v) { return text(std::to_string(v)); }

CsvWriter& CsvWriter::text(const std::string& v) {
    if (in_row_ >= columns_) throw validation_error("CsvWriter: too many cells in a row");
    if (v.find(',') != std::string::npos || v.find('\n') != std::string::npos)
        throw validation_error("CsvWriter: cell contains a separator");
    if (in_row_) buf_ += ',';
    buf_ += v;
    ++in_row_;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw validation_error("CsvWriter: row is incomplete");
    buf_ += '\n';
    in_row_ = 0;
}

const std::string& CsvWriter::str() const {
    if (in_row_ != 0) throw validation_error("CsvWriter: unfinished row");
    return buf_;
}

void CsvWriter::write(const std::string& path) const { write_text(path, str()); }

}  // namespace qbclab
