#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lkt {

struct CheckResult {
    std::string name;
    bool ok = true;
    std::string detail;
};

// Ordered list of named checks; passes iff every check passes.
struct Report {
    std::vector<CheckResult> checks;

    void add(std::string name, bool ok, std::string detail = {}) {
        checks.push_back({std::move(name), ok, std::move(detail)});
    }
    void append(const Report& r, const std::string& prefix = {}) {
        for (auto& c : r.checks) checks.push_back({prefix + c.name, c.ok, c.detail});
    }
    bool ok() const {
        for (auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
    const CheckResult* firstFailure() const {
        for (auto& c : checks)
            if (!c.ok) return &c;
        return nullptr;
    }
};

// Thrown when an exhaustive search runs past its node budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SearchOutcome { Found, Absent, BudgetExceeded };

inline const char* outcomeName(SearchOutcome o) {
    switch (o) {
        case SearchOutcome::Found: return "found";
        case SearchOutcome::Absent: return "absent";
        default: return "budget exceeded";
    }
}

}  // namespace lkt
