#include "pvass/rational.hpp"

namespace pvass {

Rational parse_rational(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    std::string num = text;
    std::string den = "1";
    if (auto slash = text.find('/'); slash != std::string::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    auto is_integer = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
        }
        return true;
    };
    if (!is_integer(num) || !is_integer(den)) {
        throw std::invalid_argument("malformed rational literal: " + text);
    }
    mpz_class n(num), d(den);
    if (d == 0) {
        throw std::invalid_argument("zero denominator in rational literal: " + text);
    }
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string rational_to_string(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double rational_to_double(const Rational& value) { return value.get_d(); }

long long rational_floor(const Rational& value) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(), value.get_den().get_mpz_t());
    if (!q.fits_slong_p()) {
        throw std::overflow_error("rational floor out of range");
    }
    return q.get_si();
}

long long rational_ceil(const Rational& value) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(), value.get_den().get_mpz_t());
    if (!q.fits_slong_p()) {
        throw std::overflow_error("rational ceil out of range");
    }
    return q.get_si();
}

Rational common_denominator(const std::vector<Rational>& values) {
    mpz_class l = 1;
    for (const auto& v : values) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
    }
    return Rational(l);
}

}  // namespace pvass
