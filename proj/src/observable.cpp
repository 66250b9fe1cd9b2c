#include "thermo/observable.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "thermo/errors.hpp"
#include "thermo/parallel.hpp"

namespace thermo {

namespace {

// Merges terms of equal frequency and drops exact zeros so that equal
// polynomials have equal representations.
std::vector<TrigPolynomial::Term> normalize(const std::vector<TrigPolynomial::Term>& terms,
                                            double& constant) {
    std::map<int, TrigPolynomial::Term> merged;
    for (const auto& t : terms) {
        if (t.k < 0) {
            fail(ErrorKind::InvalidArgument, "negative frequency in trigonometric term");
        }
        if (t.k == 0) {
            constant += t.cos_coeff;
            continue;
        }
        auto& m = merged[t.k];
        m.k = t.k;
        m.cos_coeff += t.cos_coeff;
        m.sin_coeff += t.sin_coeff;
    }
    std::vector<TrigPolynomial::Term> out;
    for (const auto& [k, t] : merged) {
        if (t.cos_coeff != 0.0 || t.sin_coeff != 0.0) out.push_back(t);
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    TrigPolynomial parse() {
        double constant = 0.0;
        std::vector<TrigPolynomial::Term> terms;
        skip();
        if (pos_ == s_.size()) error("empty observable");
        bool first = true;
        while (pos_ < s_.size()) {
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1.0 : 1.0;
                ++pos_;
                skip();
            } else if (!first) {
                error("expected + or -");
            }
            first = false;
            term(sign, constant, terms);
            skip();
        }
        return TrigPolynomial(constant, terms);
    }

private:
    void term(double sign, double& constant, std::vector<TrigPolynomial::Term>& terms) {
        double coeff = 1.0;
        bool have_number = false;
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
            coeff = number();
            have_number = true;
            skip();
            if (peek() == '*') {
                ++pos_;
                skip();
            } else {
                constant += sign * coeff;
                return;
            }
        }
        std::string name;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
            name += s_[pos_++];
        }
        if (name != "cos" && name != "sin") {
            error(have_number ? "expected cos or sin after '*'" : "unknown token");
        }
        int k = 1;
        skip();
        if (peek() == '(') {
            ++pos_;
            skip();
            double kv = number();
            if (kv != std::floor(kv) || kv < 1 || kv > 4096) error("frequency must be a positive integer");
            k = static_cast<int>(kv);
            skip();
            if (peek() != ')') error("expected ')'");
            ++pos_;
        }
        TrigPolynomial::Term t;
        t.k = k;
        if (name == "cos") t.cos_coeff = sign * coeff;
        else t.sin_coeff = sign * coeff;
        terms.push_back(t);
    }

    double number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                s_[pos_] == 'e' || s_[pos_] == 'E' ||
                ((s_[pos_] == '-' || s_[pos_] == '+') && pos_ > start &&
                 (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        std::string text(s_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size()) error("malformed number");
            return v;
        } catch (const std::logic_error&) {
            error("malformed number");
        }
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::InvalidArgument,
             "cannot parse observable '" + std::string(s_) + "': " + what);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

TrigPolynomial::TrigPolynomial(double constant, std::vector<Term> terms) : constant_(constant) {
    terms_ = normalize(terms, constant_);
}

TrigPolynomial TrigPolynomial::cosine(int k, double coeff) {
    return TrigPolynomial(0.0, {Term{k, coeff, 0.0}});
}

TrigPolynomial TrigPolynomial::sine(int k, double coeff) {
    return TrigPolynomial(0.0, {Term{k, 0.0, coeff}});
}

TrigPolynomial TrigPolynomial::parse(std::string_view text) { return Parser(text).parse(); }

double TrigPolynomial::operator()(double theta) const {
    double v = constant_;
    for (const auto& t : terms_) {
        double kt = t.k * theta;
        if (t.cos_coeff != 0.0) v += t.cos_coeff * std::cos(kt);
        if (t.sin_coeff != 0.0) v += t.sin_coeff * std::sin(kt);
    }
    return v;
}

int TrigPolynomial::degree() const { return terms_.empty() ? 0 : terms_.back().k; }

bool TrigPolynomial::is_constant() const { return terms_.empty(); }

cplx TrigPolynomial::fourier_coefficient(int k) const {
    if (k == 0) return constant_;
    int ak = k < 0 ? -k : k;
    for (const auto& t : terms_) {
        if (t.k == ak) {
            // a cos + b sin = (a - i b)/2 e^{ik} + (a + i b)/2 e^{-ik}
            return k > 0 ? cplx(t.cos_coeff / 2, -t.sin_coeff / 2)
                         : cplx(t.cos_coeff / 2, t.sin_coeff / 2);
        }
    }
    return 0.0;
}

TrigPolynomial TrigPolynomial::scaled(double factor) const {
    std::vector<Term> terms = terms_;
    for (auto& t : terms) {
        t.cos_coeff *= factor;
        t.sin_coeff *= factor;
    }
    return TrigPolynomial(constant_ * factor, terms);
}

TrigPolynomial TrigPolynomial::centered() const { return TrigPolynomial(0.0, terms_); }

std::string TrigPolynomial::describe() const {
    std::ostringstream out;
    out.precision(17);
    bool any = false;
    auto emit = [&](double c, const std::string& name, int k) {
        if (c == 0.0) return;
        if (any) out << (c < 0 ? "-" : "+");
        else if (c < 0) out << "-";
        double a = std::fabs(c);
        if (name.empty()) {
            out << a;
        } else {
            if (a != 1.0) out << a << "*";
            out << name;
            if (k != 1) out << "(" << k << ")";
        }
        any = true;
    };
    emit(constant_, "", 0);
    for (const auto& t : terms_) {
        emit(t.cos_coeff, "cos", t.k);
        emit(t.sin_coeff, "sin", t.k);
    }
    if (!any) out << "0";
    return out.str();
}

double grid_mean(const TrigPolynomial& h, int points) {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) v[j] = h(kTwoPi * j / points);
    return pairwise_sum(v.data(), v.size()) / points;
}

}  // namespace thermo
