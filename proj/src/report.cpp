#include "stirlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stirlab {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const EnergyReport& report) {
  return nlohmann::json{{"value", report.value},
                        {"domain", report.domain},
                        {"resolution_u", report.resolution_u},
                        {"resolution_v", report.resolution_v},
                        {"refinement_error", report.refinement_error}};
}

nlohmann::json to_json(const TubularComparison& comparison) {
  return nlohmann::json{{"tube_energy", comparison.tube_energy},
                        {"surface_energy", comparison.surface_energy},
                        {"ratio", comparison.ratio},
                        {"flat_ratio", comparison.flat_ratio},
                        {"curvature_margin", comparison.curvature_margin}};
}

nlohmann::json to_json(const MassFlowValue& value) {
  return nlohmann::json{{"value", value.value},
                        {"basis_constant", value.basis_constant},
                        {"norm", value.norm()},
                        {"turns", value.turns}};
}

nlohmann::json to_json(const JensenChain& chain) {
  return nlohmann::json{{"action", chain.action},
                        {"theta_norm", chain.theta_norm},
                        {"volume", chain.volume},
                        {"lower_bound", chain.lower_bound},
                        {"slack", chain.slack},
                        {"pass", chain.pass}};
}

nlohmann::json to_json(const DivergenceCertificate& certificate) {
  nlohmann::json rows = nlohmann::json::array();
  for (const CertificateRow& r : certificate.rows) {
    rows.push_back(nlohmann::json{{"index", r.index},
                                  {"radius", r.radius},
                                  {"delta", r.delta},
                                  {"lambda", r.lambda},
                                  {"turns", r.turns},
                                  {"term", r.term},
                                  {"partial_sum", r.partial_sum}});
  }
  nlohmann::json witnesses = nlohmann::json::array();
  for (const CertificateWitness& w : certificate.witnesses) {
    witnesses.push_back(nlohmann::json{
        {"bound", w.bound}, {"k", w.k}, {"partial_sum", w.partial_sum}});
  }
  return nlohmann::json{{"mode", certificate.mode},
                        {"rho0", certificate.rho0},
                        {"decay", certificate.decay},
                        {"unit_energy", certificate.unit_energy},
                        {"explicit_terms", certificate.explicit_terms},
                        {"rows", rows},
                        {"witnesses", witnesses},
                        {"config_hash", certificate.config_hash},
                        {"tool_version", std::string(kToolVersion)}};
}

std::string energy_csv_header() {
  return "block,energy,mode,lambda,delta,turns,resolution,refinement_error\n";
}

std::string energy_csv_row(int block_id, double energy, const std::string& mode,
                           double lambda, double delta, double turns, int resolution,
                           double refinement_error) {
  std::ostringstream out;
  out << block_id << ',' << format_value(energy) << ',' << mode << ','
      << format_value(lambda) << ',' << format_value(delta) << ','
      << format_value(turns) << ',' << resolution << ','
      << format_value(refinement_error) << '\n';
  return out.str();
}

std::string massflow_csv_header() { return "block,map,theta,turns\n"; }

std::string massflow_csv_row(int block_id, const std::string& map_id, double theta,
                             double turns) {
  std::ostringstream out;
  out << block_id << ',' << map_id << ',' << format_value(theta) << ','
      << format_value(turns) << '\n';
  return out.str();
}

std::string certificate_csv(const DivergenceCertificate& certificate) {
  std::ostringstream out;
  out << "index,radius,delta,lambda,turns,term,partial_sum\n";
  for (const CertificateRow& r : certificate.rows) {
    out << r.index << ',' << format_value(r.radius) << ',' << format_value(r.delta)
        << ',' << format_value(r.lambda) << ',' << format_value(r.turns) << ','
        << format_value(r.term) << ',' << format_value(r.partial_sum) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot open output file: " + path);
  out << content;
  if (!out) throw PreconditionError("failed writing output file: " + path);
}

}  // namespace stirlab
