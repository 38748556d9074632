#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "copreg/bocr.hpp"
#include "copreg/cont_regression.hpp"

namespace copreg::cli {

inline constexpr const char* kModelTag = "copreg-model v1";

// Line-oriented text:
//
//   copreg-model v1
//   task cr|bocr
//   family <name>
//   dim <copula dimension>
//   df <degrees of freedom>
//   params <free copula parameters>
//   nodes <quadrature nodes>                      (cr)
//   latent <log alpha> <log beta>                 (bocr)
//   margin <column> empirical <h> <n> <sorted sample>
//   # <trace lines>
//
// Reals are written with 17 significant digits, so a model read back
// predicts bit-identically.
using FittedModel = std::variant<CRModel, BocrModel>;

std::string serialize_model(const FittedModel& model,
                            const std::vector<std::string>& comments = {});
// Throws UsageError for a malformed or foreign file.
FittedModel parse_model(const std::string& text);

void save_model(const std::filesystem::path& path, const FittedModel& model,
                const std::vector<std::string>& comments = {});
FittedModel load_model(const std::filesystem::path& path);

}  // namespace copreg::cli
