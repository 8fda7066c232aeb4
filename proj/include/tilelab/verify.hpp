#pragma once

// Named verification suites behind the `verify` subcommand.  Each suite
// runs a construction's invariants at its documented desk scale and
// reports one line per check.

#include <string>
#include <vector>

namespace tilelab {

struct VerifyReport {
    struct Check {
        std::string name;
        bool pass = false;
        std::string detail;
        double ms = 0;
    };
    std::string suite;
    std::vector<Check> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string text() const;
    std::string json() const;
};

// suite in {grid, counting, probe, widthrestrict, gapshift, cm, all};
// throws std::invalid_argument on an unknown name.
VerifyReport run_suite(const std::string& suite);

std::vector<std::string> suite_names();

}  // namespace tilelab
