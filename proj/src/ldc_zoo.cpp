#include <cmath>
#include <stdexcept>

#include "mimoarq/errors.hpp"
#include "mimoarq/ldc.hpp"

namespace mimoarq::ldc {
namespace {

using cd = std::complex<double>;

std::vector<int> unit_rounds(int t) { return std::vector<int>(static_cast<std::size_t>(t), 1); }

std::vector<CMatrix> zeros(int count, int lt, int t) {
    return std::vector<CMatrix>(static_cast<std::size_t>(count), CMatrix::Zero(lt, t));
}

}  // namespace

LdcCode alamouti() {
    // [s1 -s2*; s2 s1*]
    auto c = zeros(2, 2, 2);
    auto d = zeros(2, 2, 2);
    c[0](0, 0) = 1.0;
    d[0](1, 1) = 1.0;
    c[1](1, 0) = 1.0;
    d[1](0, 1) = -1.0;
    return LdcCode("alamouti", 2, unit_rounds(2), std::move(c), std::move(d));
}

LdcCode sm_repetition(int lt, int rounds) {
    if (lt < 1 || rounds < 1) {
        throw std::invalid_argument("sm_repetition: lt and rounds must be >= 1");
    }
    auto c = zeros(lt, lt, rounds);
    for (int k = 0; k < lt; ++k) {
        c[static_cast<std::size_t>(k)].row(k).setOnes();
    }
    return LdcCode("sm_repetition", lt, unit_rounds(rounds), std::move(c), {});
}

LdcCode antenna_switching(int lt) {
    if (lt < 1) {
        throw std::invalid_argument("antenna_switching: lt must be >= 1");
    }
    auto c = zeros(1, lt, lt);
    for (int t = 0; t < lt; ++t) {
        c[0](t, t) = std::sqrt(static_cast<double>(lt));
    }
    return LdcCode("antenna_switching", lt, unit_rounds(lt), std::move(c), {});
}

LdcCode cdd(int lt) {
    if (lt < 1) {
        throw std::invalid_argument("cdd: lt must be >= 1");
    }
    auto c = zeros(lt, lt, lt);
    for (int a = 0; a < lt; ++a) {
        for (int t = 0; t < lt; ++t) {
            c[static_cast<std::size_t>((a + t) % lt)](a, t) = 1.0;
        }
    }
    return LdcCode("cdd", lt, unit_rounds(lt), std::move(c), {});
}

LdcCode golden() {
    const double theta = (1.0 + std::sqrt(5.0)) / 2.0;
    const double theta_bar = (1.0 - std::sqrt(5.0)) / 2.0;
    const cd i(0.0, 1.0);
    const cd alpha = 1.0 + i - i * theta;
    const cd alpha_bar = 1.0 + i - i * theta_bar;
    const double norm = 1.0 / std::sqrt(5.0);
    // X = [alpha(a + b theta), alpha(c + d theta); i alpha_bar(c + d theta_bar), alpha_bar(a + b theta_bar)] / sqrt(5)
    auto c = zeros(4, 2, 2);
    c[0](0, 0) = norm * alpha;
    c[0](1, 1) = norm * alpha_bar;
    c[1](0, 0) = norm * alpha * theta;
    c[1](1, 1) = norm * alpha_bar * theta_bar;
    c[2](0, 1) = norm * alpha;
    c[2](1, 0) = norm * i * alpha_bar;
    c[3](0, 1) = norm * alpha * theta;
    c[3](1, 0) = norm * i * alpha_bar * theta_bar;
    return LdcCode("golden", 2, unit_rounds(2), std::move(c), {});
}

LdcCode spatial_multiplexing(int lt) {
    if (lt < 1) {
        throw std::invalid_argument("spatial_multiplexing: lt must be >= 1");
    }
    auto c = zeros(lt, lt, 1);
    for (int k = 0; k < lt; ++k) {
        c[static_cast<std::size_t>(k)](k, 0) = 1.0;
    }
    return LdcCode("spatial_multiplexing", lt, {1}, std::move(c), {});
}

std::vector<std::string> zoo_names() {
    return {"alamouti", "antenna_switching", "cdd", "golden", "sm_repetition", "spatial_multiplexing"};
}

LdcCode zoo(const std::string& name, int lt, int rounds) {
    auto require_two = [&] {
        if (lt != 2) {
            throw std::invalid_argument(name + " is defined for L_t = 2 only");
        }
    };
    if (name == "alamouti") {
        require_two();
        return alamouti();
    }
    if (name == "golden") {
        require_two();
        return golden();
    }
    if (name == "sm_repetition") {
        return sm_repetition(lt, rounds);
    }
    if (name == "antenna_switching") {
        return antenna_switching(lt);
    }
    if (name == "cdd") {
        return cdd(lt);
    }
    if (name == "spatial_multiplexing") {
        return spatial_multiplexing(lt);
    }
    std::string known;
    for (const auto& n : zoo_names()) {
        known += (known.empty() ? "" : ", ") + n;
    }
    throw NotFound("unknown code '" + name + "'; known codes: " + known);
}

}  // namespace mimoarq::ldc
