#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace roeforge {

enum class CheckStatus { Pass, Fail, Info, Skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Info: return "info";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

/// One named check. `measured` and `bound` are filled whenever the check
/// compares a quantity against a limit; `witness` names the violating
/// pair / triple / t-value so a failure can be re-checked by hand.
struct Check {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::optional<double> measured;
  std::optional<double> bound;
  std::string witness;
  std::string detail;
};

class VerificationReport {
 public:
  VerificationReport() = default;
  explicit VerificationReport(std::string title) : title_(std::move(title)) {}

  const std::string& title() const { return title_; }
  const std::vector<Check>& checks() const { return checks_; }

  Check& add(Check c) {
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  // Pass iff `ok`; otherwise Fail with the witness attached.
  Check& expect(std::string name, bool ok, std::string witness = {}) {
    Check c;
    c.name = std::move(name);
    c.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
    if (!ok) c.witness = std::move(witness);
    return add(std::move(c));
  }

  // measured <= bound (plus tolerance) check.
  Check& expect_le(std::string name, double measured, double bound, double tol = 0.0,
                   std::string witness = {}) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.bound = bound;
    c.status = measured <= bound + tol ? CheckStatus::Pass : CheckStatus::Fail;
    if (c.status == CheckStatus::Fail) c.witness = std::move(witness);
    return add(std::move(c));
  }

  Check& info(std::string name, std::string detail, std::optional<double> measured = {},
              std::optional<double> bound = {}) {
    Check c;
    c.name = std::move(name);
    c.status = CheckStatus::Info;
    c.detail = std::move(detail);
    c.measured = measured;
    c.bound = bound;
    return add(std::move(c));
  }

  void merge(const VerificationReport& other, const std::string& prefix = {}) {
    for (Check c : other.checks_) {
      if (!prefix.empty()) c.name = prefix + "/" + c.name;
      checks_.push_back(std::move(c));
    }
  }

  bool ok() const {
    return std::none_of(checks_.begin(), checks_.end(),
                        [](const Check& c) { return c.status == CheckStatus::Fail; });
  }

  std::size_t count(CheckStatus s) const {
    return static_cast<std::size_t>(std::count_if(
        checks_.begin(), checks_.end(), [s](const Check& c) { return c.status == s; }));
  }

  const Check* find(const std::string& name) const {
    auto it = std::find_if(checks_.begin(), checks_.end(),
                           [&](const Check& c) { return c.name == name; });
    return it == checks_.end() ? nullptr : &*it;
  }

  std::string to_text() const {
    std::ostringstream out;
    out.precision(12);
    if (!title_.empty()) out << title_ << "\n";
    for (const Check& c : checks_) {
      out << "  [" << to_string(c.status) << "] " << c.name;
      if (c.measured) out << "  measured=" << *c.measured;
      if (c.bound) out << "  bound=" << *c.bound;
      if (!c.witness.empty()) out << "  witness: " << c.witness;
      if (!c.detail.empty()) out << "  (" << c.detail << ")";
      out << "\n";
    }
    out << (ok() ? "PASS" : "FAIL") << "\n";
    return out.str();
  }

 private:
  std::string title_;
  std::vector<Check> checks_;
};

}  // namespace roeforge
