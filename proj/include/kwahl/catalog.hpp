#pragma once

#include "kwahl/chain.hpp"
#include "kwahl/config.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kw {

// Blow-up group: `pattern` is the exceptional string between x and y after the group,
// with exactly one entry 1. A plain node is the pattern {1}.
struct BlowStep {
    std::vector<int> pattern{1};
    std::string x, y;
    bool bracketed = false;
};

struct StatedChain {
    Int n, a;
    Chain chain;
};

struct SurfaceRecord {
    std::string id;
    int k2 = 0;
    std::vector<std::string> curves;
    Int det;
    std::vector<BlowStep> steps;
    std::vector<StatedChain> chains;
    std::optional<std::string> wormhole_partner;
    std::string text;

    int blowup_count() const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(size_t pos, const std::string& msg)
        : std::runtime_error("offset " + std::to_string(pos) + ": " + msg), pos_(pos) {}
    size_t pos() const { return pos_; }

private:
    size_t pos_;
};

SurfaceRecord parse_record(const std::string& text);
std::string format_record(const SurfaceRecord& r);
std::vector<SurfaceRecord> load_records(const std::string& path);

struct PrintedMatrix {
    int k2;
    std::vector<std::string> curves;
    Int det;
    IntMatrix rows;
};

struct MainConstruction {
    std::string id;
    int k2;
    std::vector<std::string> curves;
    Int det;
    std::vector<StatedChain> chains;
    std::vector<std::vector<std::string>> du_val;
    std::vector<std::pair<std::string, Int>> meridian_anchors;
};

struct Wormhole {
    std::string first, second;
    Int delta, omega;
};

struct TJoin {
    std::string record;
    Int n;
};

struct Expected {
    std::vector<PrintedMatrix> matrices;
    std::vector<MainConstruction> mains;
    std::vector<Wormhole> wormholes;
    std::vector<TJoin> t_joins;
    std::vector<Chain> k2_one_chains;
};

Expected load_expected(const std::string& path);

struct Check {
    std::string subject;
    std::string assertion;
    bool pass;
    std::string detail;
};

struct Ledger {
    std::vector<Check> checks;

    void add(std::string subject, std::string assertion, bool pass, std::string detail = {});
    bool ok() const;
    size_t failures() const;
    void append(const Ledger& other);
};

Ledger validate_a0(const Configuration& a0, const Expected& ex, const std::vector<SurfaceRecord>& records);

struct VerifyOptions {
    bool infer_plans = true;
    bool parallel = true;
};
Ledger verify_all(const Configuration& a0, const std::vector<SurfaceRecord>& records, const Expected& ex,
                  const VerifyOptions& opt = {});

// Default data locations: $KWAHL_DATA, else the source tree's data directory.
std::string default_data_dir();

}  // namespace kw
