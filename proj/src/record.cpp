#include "kwahl/catalog.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace kw {

namespace {

const std::string kTimes = "\xC3\x97";  // U+00D7
const std::string kCap = "\xE2\x88\xA9";  // U+2229

class Cursor {
public:
    explicit Cursor(const std::string& s) : s_(s) {}

    size_t pos() const { return i_; }
    bool done() {
        ws();
        return i_ >= s_.size();
    }
    void ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(const std::string& lit) {
        ws();
        return s_.compare(i_, lit.size(), lit) == 0;
    }
    bool accept(const std::string& lit) {
        if (!peek(lit)) return false;
        i_ += lit.size();
        return true;
    }
    void expect(const std::string& lit, const char* what) {
        if (!accept(lit)) fail(std::string("expected ") + what);
    }
    [[noreturn]] void fail(const std::string& msg) const {
        std::string near = s_.substr(i_, 16);
        throw ParseError(i_, msg + (near.empty() ? " at end of input" : " near '" + near + "'"));
    }
    Int integer() {
        ws();
        size_t j = i_;
        if (j < s_.size() && (s_[j] == '-' || s_[j] == '+')) ++j;
        size_t k = j;
        while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
        if (k == j) fail("expected an integer");
        Int v(s_.substr(j, k - j));
        if (s_[i_] == '-') v = -v;
        i_ = k;
        return v;
    }
    std::string name() {
        ws();
        size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
        if (j == i_) fail("expected a curve name");
        std::string out = s_.substr(i_, j - i_);
        i_ = j;
        return out;
    }
    std::vector<int> int_list(const char* what) {
        expect("[", what);
        std::vector<int> out;
        if (peek("]")) fail("empty list");
        do {
            out.push_back(static_cast<int>(integer()));
        } while (accept(","));
        expect("]", "']'");
        return out;
    }
    std::string rest_id() {
        ws();
        size_t j = i_;
        while (j < s_.size() && s_[j] != ')') ++j;
        if (j == s_.size() || j == i_) fail("expected a record id");
        std::string out = s_.substr(i_, j - i_);
        i_ = j;
        return out;
    }

private:
    const std::string& s_;
    size_t i_ = 0;
};

bool accept_times(Cursor& c) { return c.accept(kTimes) || c.accept("x") || c.accept("*"); }
bool accept_cap(Cursor& c) { return c.accept(kCap) || c.accept("^"); }

}  // namespace

int SurfaceRecord::blowup_count() const {
    int total = 0;
    for (const BlowStep& s : steps) total += static_cast<int>(s.pattern.size());
    return total;
}

SurfaceRecord parse_record(const std::string& text) {
    Cursor c(text);
    SurfaceRecord r;
    r.text = text;
    c.expect("(", "'(' opening the record id");
    r.id = c.rest_id();
    c.expect(")", "')'");
    c.expect("K^2", "'K^2'");
    c.expect("=", "'='");
    r.k2 = static_cast<int>(c.integer());
    c.expect("-", "' - ' separator");
    c.expect("{", "'{' opening the curve list");
    if (c.peek("}")) c.fail("empty curve list");
    do {
        r.curves.push_back(c.name());
    } while (c.accept(","));
    c.expect("}", "'}'");
    c.expect("-", "' - ' separator");
    c.expect("det", "'det'");
    c.expect("=", "'='");
    r.det = c.integer();
    c.expect("-", "' - ' separator");
    do {
        BlowStep st;
        if (c.peek("[")) {
            st.pattern = c.int_list("'['");
            st.bracketed = true;
            if (!accept_times(c)) c.fail("expected the multiplication sign after a bracket pattern");
            int ones = 0;
            for (int p : st.pattern) {
                if (p < 1) c.fail("bracket pattern entries must be positive");
                ones += p == 1;
            }
            if (ones != 1) c.fail("bracket pattern must contain exactly one 1");
        }
        st.x = c.name();
        if (!accept_cap(c)) c.fail("expected the intersection sign between two curve names");
        st.y = c.name();
        r.steps.push_back(st);
    } while (c.accept(","));
    while (c.accept("-")) {
        StatedChain sc;
        c.expect("(", "'(' opening (n,a)");
        sc.n = c.integer();
        c.expect(",", "','");
        sc.a = c.integer();
        c.expect(")", "')'");
        c.expect(":", "':'");
        sc.chain = c.int_list("'[' opening a chain");
        r.chains.push_back(sc);
    }
    if (!c.done()) c.fail("unexpected trailing text");
    if (r.chains.empty()) c.fail("record lists no chains");
    return r;
}

std::string format_record(const SurfaceRecord& r) {
    std::ostringstream os;
    os << "(" << r.id << ") K^2=" << r.k2 << " - {";
    for (size_t i = 0; i < r.curves.size(); ++i) os << (i ? ", " : "") << r.curves[i];
    os << "} - det=" << r.det << " - ";
    for (size_t i = 0; i < r.steps.size(); ++i) {
        const BlowStep& s = r.steps[i];
        if (i) os << ", ";
        if (s.bracketed || s.pattern.size() > 1) os << format_chain(s.pattern) << " " << kTimes << " ";
        os << s.x << kCap << s.y;
    }
    for (const StatedChain& sc : r.chains) os << " - (" << sc.n << "," << sc.a << "):" << format_chain(sc.chain);
    return os.str();
}

std::vector<SurfaceRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<SurfaceRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (line.back() == '\r') line.pop_back();
        try {
            out.push_back(parse_record(line.substr(first)));
        } catch (const ParseError& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace kw
