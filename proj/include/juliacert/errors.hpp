#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace juliacert {

/// Exponent range or alignment-shift limit of exact dyadic arithmetic exceeded.
/// Overflow is always reported, never absorbed silently.
class overflow_error : public std::runtime_error {
public:
    explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

/// A configured budget (precision ladder, degree cap, subdivision depth, ...)
/// ran out before the computation could certify a result.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// A root sits on (or indistinguishably close to) the boundary of the region
/// being searched; the caller should inflate or shift the region and retry.
class boundary_ambiguity_error : public std::runtime_error {
public:
    explicit boundary_ambiguity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid command-line or API configuration. Collects every violation found.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
    explicit usage_error(const std::string& problem)
        : usage_error(std::vector<std::string>{problem}) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string out;
        for (const auto& p : ps) {
            if (!out.empty()) out += "; ";
            out += p;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

} // namespace juliacert
