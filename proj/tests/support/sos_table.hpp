#pragma once

#include "palps/model.hpp"
#include "palps/semantics.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace palps::testing {

/// A model with its semantics and initial configuration.
struct Fixture {
  std::unique_ptr<Model> model;
  std::unique_ptr<Semantics> sem;
  Configuration init;

  explicit Fixture(const std::string& text);

  std::string env(const Configuration& c) const;
  std::string state(const Configuration& c) const;
  /// Sorted "label => state {env}" lines.
  std::vector<std::string> nondet(const Configuration& c) const;
  std::vector<std::string> prioritized(const Configuration& c) const;
  /// Sorted "weight => state {env}" lines.
  std::vector<std::string> prob(const Configuration& c) const;
};

/// One single-step case: `observe` yields lines compared verbatim with `expected`.
struct SosCase {
  std::string rule;
  std::string model;  // empty for environment-only cases
  std::function<std::vector<std::string>(const Fixture*)> observe;
  std::vector<std::string> expected;
};

const std::vector<SosCase>& sos_table();

struct SosOutcome {
  bool pass = false;
  std::vector<std::string> observed;
  std::string error;
};
SosOutcome run_case(const SosCase& c);

}  // namespace palps::testing
