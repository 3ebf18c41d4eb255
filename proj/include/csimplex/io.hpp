#ifndef CSIMPLEX_IO_HPP
#define CSIMPLEX_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "csimplex/flow.hpp"
#include "csimplex/hypotheses.hpp"
#include "csimplex/mesh.hpp"
#include "csimplex/poincare.hpp"
#include "csimplex/simplex.hpp"
#include "csimplex/verify.hpp"

namespace csimplex {

inline constexpr const char* kVersion = "0.1.0";

/// Version/config stamp embedded in every output file.
struct Meta {
    std::string config_hash;
    std::uint64_t seed = 0;
    bool hypotheses_verified = true;
};

/// FNV-1a 64 over the canonical config string, hex-encoded.
std::string config_hash(const std::string& canonical_config);

std::string format_full(double v);  // 17 significant digits

// CSV writers (gnuplot-ready; one leading '#' metadata line, then the header)
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<FlowResult>& traj, const Meta& meta);
void write_mesh_csv(const std::string& path, const RadialMesh& mesh, const Meta& meta);
void write_gap_history_csv(const std::string& path, const std::vector<GapRecord>& hist,
                           const Meta& meta);
void write_iterates_csv(const std::string& path, const std::vector<Vec>& iterates,
                        const Meta& meta);

RadialMesh read_mesh_csv(const std::string& path);

// JSON emitters
std::string hypothesis_reports_json(const std::vector<HypothesisReport>& reports,
                                    const Meta& meta);
std::string axis_profiles_json(const std::vector<AxisProfile>& profiles, const Meta& meta);
std::string verification_reports_json(const std::vector<VerificationReport>& reports,
                                      const Meta& meta);
std::string sigma_summary_json(const SigmaResult& res, double runtime_seconds,
                               const Meta& meta);
std::string family_index_json(const SectionFamily& family, double T, double tol,
                              double gap, const Meta& meta);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace csimplex

#endif
