#pragma once

#include <stdexcept>
#include <string>

namespace pllhopf {

struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : std::invalid_argument {
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidFrequency : std::invalid_argument {
  explicit InvalidFrequency(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateCrossing : std::runtime_error {
  explicit DegenerateCrossing(const std::string& what) : std::runtime_error(what) {}
};

struct NotAHopfPoint : std::invalid_argument {
  explicit NotAHopfPoint(const std::string& what) : std::invalid_argument(what) {}
};

struct RankDeficiency : std::runtime_error {
  explicit RankDeficiency(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfDomain : std::invalid_argument {
  explicit OutOfDomain(const std::string& what) : std::invalid_argument(what) {}
};

struct DegeneratePairing : std::runtime_error {
  explicit DegeneratePairing(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidStep : std::invalid_argument {
  explicit InvalidStep(const std::string& what) : std::invalid_argument(what) {}
};

struct StepUnderflow : std::runtime_error {
  explicit StepUnderflow(const std::string& what) : std::runtime_error(what) {}
};

struct TooShort : std::invalid_argument {
  explicit TooShort(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace pllhopf
