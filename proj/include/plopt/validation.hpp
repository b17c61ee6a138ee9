#pragma once

// Validation reporting shared by all modules. Violations are data, not
// exceptions: validators collect everything wrong and the caller decides
// (the CLI exits 1 when any error-severity item is present; warnings
// never fail a run).

#include <string>
#include <vector>

namespace plopt {

struct Violation {
    enum class Severity { error, warning };
    Severity severity;
    std::string where;    // offending id or file location
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> items;

    void add_error(std::string where, std::string message) {
        items.push_back({Violation::Severity::error, std::move(where), std::move(message)});
    }
    void add_warning(std::string where, std::string message) {
        items.push_back({Violation::Severity::warning, std::move(where), std::move(message)});
    }
    void merge(const ValidationReport& other) {
        items.insert(items.end(), other.items.begin(), other.items.end());
    }
    bool ok() const {  // warnings do not invalidate
        for (const auto& v : items)
            if (v.severity == Violation::Severity::error) return false;
        return true;
    }
    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& v : items)
            if (v.severity == Violation::Severity::error) ++n;
        return n;
    }
};

}  // namespace plopt
