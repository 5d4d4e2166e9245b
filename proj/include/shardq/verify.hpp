#pragma once

#include <string>
#include <vector>

namespace shardq {

struct VerifyLine {
    std::string name;
    bool pass;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyLine> lines;
    bool all_pass = true;

    void add(const std::string& name, bool pass, const std::string& detail = "");
    std::string to_text() const;
};

// Conformance suites: the Clifford decomposition table, Choi-matrix channel
// equality of every shipped QPD table (including rejection of the swapped
// eigenstate pairing the oracle corrected), knit exactness on the two-address
// encoder, and the reconstruction micro-contracts.
VerifyReport run_verification();

}  // namespace shardq
