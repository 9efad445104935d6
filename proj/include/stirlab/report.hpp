#pragma once

#include "stirlab/blocks.hpp"
#include "stirlab/energy.hpp"
#include "stirlab/massflow.hpp"

#include <json.hpp>

#include <string>

namespace stirlab {

// JSON ledgers.  nlohmann objects keep keys sorted, and doubles are written
// with shortest-round-trip precision, so two runs of the same configuration
// emit byte-identical reports.

nlohmann::json to_json(const EnergyReport& report);
nlohmann::json to_json(const TubularComparison& comparison);
nlohmann::json to_json(const MassFlowValue& value);
nlohmann::json to_json(const JensenChain& chain);
nlohmann::json to_json(const DivergenceCertificate& certificate);

// CSV ledgers (plot-ready, one row per block / measurement).

std::string energy_csv_header();
std::string energy_csv_row(int block_id, double energy, const std::string& mode,
                           double lambda, double delta, double turns, int resolution,
                           double refinement_error);

std::string massflow_csv_header();
std::string massflow_csv_row(int block_id, const std::string& map_id, double theta,
                             double turns);

std::string certificate_csv(const DivergenceCertificate& certificate);

/// %.17g, the fixed width used anywhere a double enters a text ledger.
std::string format_value(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace stirlab
