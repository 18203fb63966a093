#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fujita/evolution.hpp"
#include "fujita/experiments.hpp"
#include "fujita/fit.hpp"
#include "fujita/geometry.hpp"
#include "fujita/kernel_lab.hpp"
#include "fujita/weight.hpp"

namespace fujita::report {

using Json = nlohmann::json;

/// 17 significant digits, the format used in every CSV.
std::string number(double v);

Json to_json(const Weight& w);
Json to_json(const fit::DecayFit& f);
Json to_json(const geometry::DoublingReport& r);
Json to_json(const geometry::EnvelopeReport& r);
Json to_json(const kernel_lab::AxiomReport& r);
Json to_json(const kernel_lab::SandwichReport& r);
Json to_json(const evolution::RunOutcome& r);
Json to_json(const experiments::PhasePoint& r);
Json to_json(const experiments::AkConstant& r);

void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Header row then one row per index; all columns must have equal length.
void write_columns_csv(std::ostream& out, std::span<const std::string> header,
                       std::span<const std::vector<double>> columns);

/// Long format: t, x_1[, x_2, x_3], value.
void write_kernel_csv(std::ostream& out, const kernel_lab::KernelEstimate& k);

/// One line such as "BlowUp t in [0.98, 1.02]".
std::string summary(const evolution::RunOutcome& r);

}  // namespace fujita::report
