#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mimoarq/ldc.hpp"

namespace mimoarq::ldc {
namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, int line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(const std::string& text, int line) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("line " + std::to_string(line) + ": bad integer '" + text + "'");
    }
    return v;
}

std::complex<double> parse_entry(const std::string& token, int line) {
    const auto comma = token.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("line " + std::to_string(line) + ": expected re,im but got '" + token + "'");
    }
    const std::string_view view(token);
    return {parse_double(view.substr(0, comma), line), parse_double(view.substr(comma + 1), line)};
}

void write_matrix(std::ostream& out, const CMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c ? " " : "") << format_double(m(r, c).real()) << ',' << format_double(m(r, c).imag());
        }
        out << '\n';
    }
}

}  // namespace

void save_ldc(const LdcCode& code, std::ostream& out) {
    out << "name " << code.name() << '\n';
    out << "lt " << code.lt() << '\n';
    out << "t " << code.t_total() << '\n';
    out << "k " << code.k() << '\n';
    out << "rounds";
    for (int t : code.round_lengths()) {
        out << ' ' << t;
    }
    out << '\n';
    for (int k = 0; k < code.k(); ++k) {
        out << "C " << k << '\n';
        write_matrix(out, code.c_mats()[static_cast<std::size_t>(k)]);
        out << "D " << k << '\n';
        write_matrix(out, code.d_mats()[static_cast<std::size_t>(k)]);
    }
}

LdcCode load_ldc(std::istream& in) {
    std::string name;
    int lt = 0;
    int t = 0;
    int k = 0;
    std::vector<int> rounds;
    std::map<int, CMatrix> c_mats;
    std::map<int, CMatrix> d_mats;

    std::string raw;
    int line = 0;
    CMatrix* target = nullptr;
    int rows_left = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::string key;
        if (!(ls >> key) || key[0] == '#') {
            continue;
        }
        if (rows_left > 0) {
            const int r = lt - rows_left;
            std::vector<std::string> tokens{key};
            for (std::string tok; ls >> tok;) {
                tokens.push_back(tok);
            }
            if (static_cast<int>(tokens.size()) != t) {
                throw std::invalid_argument("line " + std::to_string(line) + ": expected " + std::to_string(t) +
                                            " entries");
            }
            for (int col = 0; col < t; ++col) {
                (*target)(r, col) = parse_entry(tokens[static_cast<std::size_t>(col)], line);
            }
            --rows_left;
            continue;
        }
        std::string value;
        if (key == "name") {
            std::getline(ls >> std::ws, name);
        } else if (key == "lt" || key == "t" || key == "k") {
            ls >> value;
            (key == "lt" ? lt : key == "t" ? t : k) = parse_int(value, line);
        } else if (key == "rounds") {
            while (ls >> value) {
                rounds.push_back(parse_int(value, line));
            }
        } else if (key == "C" || key == "D") {
            if (lt < 1 || t < 1 || k < 1) {
                throw std::invalid_argument("line " + std::to_string(line) + ": header must precede matrices");
            }
            ls >> value;
            const int idx = parse_int(value, line);
            if (idx < 0 || idx >= k) {
                throw std::invalid_argument("line " + std::to_string(line) + ": matrix index out of range");
            }
            auto& slot = key == "C" ? c_mats : d_mats;
            if (slot.count(idx)) {
                throw std::invalid_argument("line " + std::to_string(line) + ": duplicate " + key + " " + value);
            }
            target = &(slot[idx] = CMatrix::Zero(lt, t));
            rows_left = lt;
        } else {
            throw std::invalid_argument("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    if (rows_left > 0) {
        throw std::invalid_argument("truncated matrix at end of input");
    }
    if (static_cast<int>(c_mats.size()) != k || static_cast<int>(d_mats.size()) != k) {
        throw std::invalid_argument("every C k and D k block must be present");
    }
    std::vector<CMatrix> c;
    std::vector<CMatrix> d;
    for (int i = 0; i < k; ++i) {
        c.push_back(c_mats[i]);
        d.push_back(d_mats[i]);
    }
    LdcCode code(name, lt, rounds, std::move(c), std::move(d));
    if (code.t_total() != t) {
        throw std::invalid_argument("round lengths do not sum to t");
    }
    return code;
}

LdcCode load_ldc_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open code file '" + path + "'");
    }
    return load_ldc(in);
}

}  // namespace mimoarq::ldc
