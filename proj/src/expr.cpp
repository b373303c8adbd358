#include "oqs/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace oqs {

namespace {

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    OperatorExpr parse() {
        OperatorExpr e;
        skip_ws();
        double lead = 1.0;
        if (peek() == '+' || peek() == '-') lead = (take() == '-') ? -1.0 : 1.0;
        e.terms.push_back(parse_term(lead));
        skip_ws();
        while (pos_ < s_.size()) {
            char c = peek();
            if (c != '+' && c != '-') throw ParseError("expected '+' or '-'", pos_);
            take();
            e.terms.push_back(parse_term(c == '-' ? -1.0 : 1.0));
            skip_ws();
        }
        return e;
    }

  private:
    ExprTerm parse_term(double sign) {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("expected a term", pos_);
        ExprTerm t;
        if (starts_number()) {
            t.coeff = sign * parse_complex_literal();
        } else {
            t.coeff = sign;
            t.factors.push_back(parse_factor());
        }
        skip_ws();
        while (peek() == '*') {
            take();
            t.factors.push_back(parse_factor());
            skip_ws();
        }
        return t;
    }

    ExprFactor parse_factor() {
        skip_ws();
        std::size_t at = pos_;
        if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(peek())))
            throw ParseError("expected an operator name", pos_);
        ExprFactor f;
        f.offset = at;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(peek())))
            f.name.push_back(take());
        skip_ws();
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
            std::size_t site_at = pos_;
            long v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + (take() - '0');
                if (v > 1000000) throw ParseError("site index out of range", site_at);
            }
            if (pos_ < s_.size() && peek() == '.')
                throw ParseError("site index must be an integer", site_at);
            f.site = static_cast<int>(v);
        }
        skip_ws();
        if (peek() == '\'') {
            take();
            f.dagger = true;
        }
        return f;
    }

    // One complex-literal token: <num>, <num>i, or <num><sign><num>i with no
    // internal whitespace. A following sign that does not complete the
    // pattern is left for the expression level.
    cd parse_complex_literal() {
        double first = parse_number();
        if (pos_ < s_.size() && peek() == 'i') {
            take();
            return cd(0.0, first);
        }
        if (pos_ < s_.size() && (peek() == '+' || peek() == '-')) {
            std::size_t save = pos_;
            double sign = (take() == '-') ? -1.0 : 1.0;
            if (pos_ < s_.size() && starts_number()) {
                double second = parse_number();
                if (pos_ < s_.size() && peek() == 'i') {
                    take();
                    return cd(first, sign * second);
                }
            }
            pos_ = save;
        }
        return cd(first, 0.0);
    }

    double parse_number() {
        std::size_t at = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ < s_.size() && peek() == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (pos_ == at || (pos_ == at + 1 && s_[at] == '.'))
            throw ParseError("expected a number", at);
        if (pos_ < s_.size() && (peek() == 'e' || peek() == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (peek() == '+' || peek() == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        return std::strtod(s_.substr(at, pos_ - at).c_str(), nullptr);
    }

    bool starts_number() const {
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return true;
        return c == '.' && pos_ + 1 < s_.size() &&
               std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]));
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char take() { return s_[pos_++]; }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string s_;
    std::size_t pos_ = 0;
};

Operator factor_operator(const std::string& name, int dim, std::size_t at) {
    if (name == "id") return identity(HilbertSpace{dim});
    if (name == "a") {
        if (dim < 2) throw SemanticError("'a' needs a factor of dimension >= 2", at);
        return annihilation(dim - 1);
    }
    if (name == "n") {
        Mat m = Mat::Zero(dim, dim);
        for (int k = 0; k < dim; ++k) m(k, k) = static_cast<double>(k);
        return {HilbertSpace{dim}, std::move(m)};
    }
    PauliAxis axis;
    if (name == "sx")
        axis = PauliAxis::x;
    else if (name == "sy")
        axis = PauliAxis::y;
    else if (name == "sz")
        axis = PauliAxis::z;
    else if (name == "sp")
        axis = PauliAxis::plus;
    else if (name == "sm")
        axis = PauliAxis::minus;
    else
        throw SemanticError("unknown operator name '" + name + "'", at);
    if (dim != 2)
        throw SemanticError("'" + name + "' needs a two-dimensional factor", at);
    return pauli(axis);
}

std::string fmt_double(double v) {
    char buf[64];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

// One coefficient token; the caller has already made re(c) > 0, or re(c) == 0
// and im(c) > 0, by folding the sign into the surrounding '+'/'-'.
std::string fmt_coeff(cd c) {
    if (c.imag() == 0.0) return fmt_double(c.real());
    if (c.real() == 0.0) return fmt_double(c.imag()) + "i";
    return fmt_double(c.real()) + (c.imag() < 0 ? "-" : "+") + fmt_double(std::abs(c.imag())) +
           "i";
}

}  // namespace

Operator OperatorExpr::realize(const HilbertSpace& space) const {
    Operator sum = zero_operator(space);
    for (const ExprTerm& t : terms) {
        Operator prod = identity(space) * t.coeff;
        for (const ExprFactor& f : t.factors) {
            int site;
            if (f.site.has_value()) {
                site = *f.site - 1;
                if (site < 0 || site >= space.n_factors())
                    throw SemanticError("site index out of range", f.offset);
            } else {
                if (space.n_factors() != 1)
                    throw SemanticError(
                        "site index required when the space has several factors", f.offset);
                site = 0;
            }
            Operator op = factor_operator(f.name, space.dims[site], f.offset);
            if (f.dagger) op = op.adjoint();
            prod = prod * embed(op, site, space);
        }
        sum = sum + prod;
    }
    return sum;
}

std::string OperatorExpr::pretty() const {
    if (terms.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        cd c = terms[k].coeff;
        bool neg = c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0);
        if (neg) c = -c;
        if (k == 0)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        bool unit = (c == cd(1.0, 0.0));
        if (!unit || terms[k].factors.empty()) out += fmt_coeff(c);
        for (std::size_t j = 0; j < terms[k].factors.size(); ++j) {
            if (j > 0 || !unit) out += "*";
            const ExprFactor& f = terms[k].factors[j];
            out += f.name;
            if (f.site.has_value()) out += std::to_string(*f.site);
            if (f.dagger) out += "'";
        }
    }
    return out;
}

OperatorExpr parse_expr(const std::string& text) { return Parser(text).parse(); }

Operator parse_operator_expression(const std::string& text, const HilbertSpace& space) {
    return parse_expr(text).realize(space);
}

}  // namespace oqs
