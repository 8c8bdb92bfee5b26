#ifndef SSRED_DIAGNOSTICS_HPP
#define SSRED_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssred {

enum class Severity { Error, Warning };

inline const char* severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

struct DiagnosticEntry {
    std::string rule;
    Severity severity{Severity::Error};
    std::vector<std::string> elements; ///< offending element ids, e.g. "vertex 3"
    std::string message;
};

/// Structured validation report. An object is valid exactly when the report
/// carries no error entry; warnings flag underdetermined but usable data.
class Diagnostics {
public:
    void add(std::string rule, std::vector<std::string> elements, std::string message,
             Severity severity = Severity::Error) {
        entries_.push_back({std::move(rule), severity, std::move(elements), std::move(message)});
    }

    void merge(const Diagnostics& other, const std::string& prefix = "") {
        for (const auto& e : other.entries_) {
            DiagnosticEntry copy = e;
            if (!prefix.empty()) copy.rule = prefix + e.rule;
            entries_.push_back(std::move(copy));
        }
    }

    bool ok() const {
        for (const auto& e : entries_) {
            if (e.severity == Severity::Error) return false;
        }
        return true;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<DiagnosticEntry>& entries() const { return entries_; }

    bool has_rule(const std::string& rule) const {
        for (const auto& e : entries_) {
            if (e.rule == rule) return true;
        }
        return false;
    }

    std::string summary() const {
        std::string out;
        for (const auto& e : entries_) {
            if (!out.empty()) out += "; ";
            out += e.rule;
            for (const auto& el : e.elements) out += " " + el;
        }
        return out;
    }

private:
    std::vector<DiagnosticEntry> entries_;
};

/// Thrown when an operation's input fails validation; carries the full report.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(Diagnostics diags)
        : std::runtime_error("validation failed: " + diags.summary()),
          diagnostics_(std::move(diags)) {}

    const Diagnostics& diagnostics() const { return diagnostics_; }

private:
    Diagnostics diagnostics_;
};

/// Thrown when a stated precondition of an operation is violated. `payload`
/// carries operation-specific data such as the required splitting index.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(std::string rule, const std::string& message,
                      std::optional<std::int64_t> payload = std::nullopt)
        : std::runtime_error(rule + ": " + message),
          rule_(std::move(rule)),
          payload_(payload) {}

    const std::string& rule() const { return rule_; }
    std::optional<std::int64_t> payload() const { return payload_; }

private:
    std::string rule_;
    std::optional<std::int64_t> payload_;
};

/// An internal invariant broke mid-run. On inputs that pass validation this
/// indicates a bug (or cover data that no actual morphism realizes).
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& message) : std::logic_error(message) {}
};

} // namespace ssred

#endif // SSRED_DIAGNOSTICS_HPP
