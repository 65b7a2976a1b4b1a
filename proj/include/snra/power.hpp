#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "snra/error.hpp"
#include "snra/fsm.hpp"
#include "snra/reference_tables_data.hpp"  // generated from data/reference_tables.txt
#include "snra/topology.hpp"

namespace snra::power {

enum class Technology { Sram, SheMtj };

inline Technology parse_technology(std::string_view name) {
  if (name == "sram" || name == "SRAM-LUT") return Technology::Sram;
  if (name == "she-mtj" || name == "SHE-MTJ-LUT") return Technology::SheMtj;
  throw DomainError("unknown technology '" + std::string(name) + "' (expected sram or she-mtj)");
}

inline std::string_view to_string(Technology t) { return t == Technology::Sram ? "sram" : "she-mtj"; }

/// Constants of one six-input fracturable LUT.
struct LutTechnology {
  std::string name;
  std::uint32_t mos_count = 0;
  std::uint32_t mtj_count = 0;
  double p_read_uw = 0;
  double p_write_uw = 0;
  double p_static_uw = 0;
  double d_read_ps = 0;  // upper bounds
  double d_write_ps = 0;
  double e_read_aj = 0;
  double e_write_aj = 0;
};

/// FSM resource utilization of one topology; opaque reference data.
struct UtilizationRecord {
  Topology topology;
  std::uint32_t slice_registers = 0;
  std::uint32_t slice_luts = 0;
  std::uint32_t fully_used_lut_ffs = 0;
  double reported_power_mw = 0;
};

class ReferenceTables {
 public:
  static ReferenceTables parse(std::string_view text) {
    ReferenceTables t;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string kind;
      if (!(fields >> kind)) continue;
      auto fail = [&](const std::string& why) {
        return FormatError("reference tables line " + std::to_string(line_no) + ": " + why);
      };
      if (kind == "tech") {
        LutTechnology r;
        if (!(fields >> r.name >> r.mos_count >> r.mtj_count >> r.p_read_uw >> r.p_write_uw >> r.p_static_uw >>
              r.d_read_ps >> r.d_write_ps >> r.e_read_aj >> r.e_write_aj)) {
          throw fail("malformed tech record");
        }
        if (r.p_read_uw < 0 || r.p_write_uw < 0 || r.p_static_uw < 0 || r.d_read_ps < 0 || r.d_write_ps < 0 ||
            r.e_read_aj < 0 || r.e_write_aj < 0) {
          throw fail("negative constant");
        }
        const Technology tech = parse_technology(r.name);
        if (tech == Technology::Sram && r.mtj_count != 0) throw fail("SRAM LUT cannot contain MTJs");
        (tech == Technology::Sram ? t.sram_ : t.she_mtj_) = r;
      } else if (kind == "util") {
        std::string topo;
        UtilizationRecord u;
        if (!(fields >> topo >> u.slice_registers >> u.slice_luts >> u.fully_used_lut_ffs >> u.reported_power_mw)) {
          throw fail("malformed util record");
        }
        u.topology = Topology::parse(topo);
        t.utilization_.push_back(std::move(u));
      } else {
        throw fail("unknown record kind '" + kind + "'");
      }
      std::string extra;
      if (fields >> extra) throw fail("unexpected trailing field '" + extra + "'");
    }
    if (!t.sram_ || !t.she_mtj_) throw FormatError("reference tables need both technology records");
    return t;
  }

  static ReferenceTables load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read reference tables '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static const ReferenceTables& bundled() {
    static const ReferenceTables tables = parse(kBundledReferenceTables);
    return tables;
  }

  const LutTechnology& lut(Technology t) const { return t == Technology::Sram ? *sram_ : *she_mtj_; }
  const std::vector<UtilizationRecord>& utilization() const noexcept { return utilization_; }

  /// Exact topology match, else the first record whose largest RBM matches
  /// (the shared FSM is sized by the largest RBM).
  const UtilizationRecord* find(const Topology& topology) const {
    for (const auto& u : utilization_) {
      if (u.topology == topology) return &u;
    }
    const auto largest = topology.largest_rbm();
    for (const auto& u : utilization_) {
      if (u.topology.largest_rbm() == largest) return &u;
    }
    return nullptr;
  }

 private:
  std::optional<LutTechnology> sram_;
  std::optional<LutTechnology> she_mtj_;
  std::vector<UtilizationRecord> utilization_;
};

/// Active and idle LUT-FF pairs attributed to one RBM stage.
struct StageActivity {
  std::uint64_t active = 0;
  std::uint64_t idle = 0;
};

/// Standby power an idle LUT actually draws. Non-volatile SHE-MTJ LUTs are
/// power-gated when idle and draw nothing.
inline double idle_power_uw(Technology t, const ReferenceTables& tables = ReferenceTables::bundled()) {
  return t == Technology::Sram ? tables.lut(t).p_static_uw : 0.0;
}

/// sum_i A_i * P_read + I_i * P_standby, in mW.
inline double power_total(std::span<const StageActivity> stages, Technology tech,
                          const ReferenceTables& tables = ReferenceTables::bundled()) {
  const double p_read = tables.lut(tech).p_read_uw;
  const double p_idle = idle_power_uw(tech, tables);
  double uw = 0.0;
  for (const auto& s : stages) uw += static_cast<double>(s.active) * p_read + static_cast<double>(s.idle) * p_idle;
  return uw * 1e-3;
}

/// Stage accounting for a topology with F fully-used LUT-FF pairs:
///  - a single RBM (input x classes) keeps its F pairs active, none idle;
///  - otherwise the first feature-learning RBM contributes F active and F
///    idle pairs, and each further feature-learning RBM F active pairs.
/// The output RBM of a deeper stack adds nothing of its own.
inline std::vector<StageActivity> stage_activity(const Topology& topology,
                                                 const ReferenceTables& tables = ReferenceTables::bundled()) {
  const UtilizationRecord* rec = tables.find(topology);
  if (rec == nullptr) throw TopologyError("no utilization data for topology " + topology.to_string());
  const std::uint64_t f = rec->fully_used_lut_ffs;
  const std::size_t feature_rbms = topology.layer_count() - 2;
  if (feature_rbms == 0) return {StageActivity{f, 0}};
  std::vector<StageActivity> stages{StageActivity{f, f}};
  for (std::size_t k = 1; k < feature_rbms; ++k) stages.push_back(StageActivity{f, 0});
  return stages;
}

inline double topology_power(const Topology& topology, Technology tech,
                             const ReferenceTables& tables = ReferenceTables::bundled()) {
  const auto stages = stage_activity(topology, tables);
  return power_total(stages, tech, tables);
}

struct DeviceCounts {
  std::uint64_t mos = 0;
  std::uint64_t mtj = 0;
};

inline DeviceCounts device_counts(std::uint64_t lut_count, Technology tech,
                                  const ReferenceTables& tables = ReferenceTables::bundled()) {
  const auto& t = tables.lut(tech);
  return {lut_count * t.mos_count, lut_count * t.mtj_count};
}

/// Fractional MOS transistor saving of SHE-MTJ LUTs over SRAM LUTs.
inline double mos_reduction(const ReferenceTables& tables = ReferenceTables::bundled()) {
  return 1.0 - static_cast<double>(tables.lut(Technology::SheMtj).mos_count) /
                   static_cast<double>(tables.lut(Technology::Sram).mos_count);
}

/// Flip-flops of the controller for the largest RBM: v, v_bar, BL_reg and
/// SL_reg (n_v each), h and h_bar (n_h each), the column counter and the
/// two-bit state register.
inline std::uint64_t register_estimate(const Topology& topology) {
  const auto [nv, nh] = topology.largest_rbm();
  return 4 * nv + 2 * nh + counter_width(nh) + 2;
}

struct ComparisonRow {
  Topology topology;
  std::uint64_t luts = 0;
  double sram_mw = 0;
  double she_mtj_mw = 0;
  double power_reduction = 0;  // fraction
  DeviceCounts sram_devices;
  DeviceCounts she_mtj_devices;
  double mos_reduction = 0;  // fraction
  double reported_sram_mw = 0;
};

inline std::vector<ComparisonRow> compare(std::span<const Topology> topologies,
                                          const ReferenceTables& tables = ReferenceTables::bundled()) {
  std::vector<ComparisonRow> rows;
  for (const auto& topo : topologies) {
    const UtilizationRecord* rec = tables.find(topo);
    if (rec == nullptr) throw TopologyError("no utilization data for topology " + topo.to_string());
    ComparisonRow r;
    r.topology = topo;
    r.luts = rec->fully_used_lut_ffs;
    r.sram_mw = topology_power(topo, Technology::Sram, tables);
    r.she_mtj_mw = topology_power(topo, Technology::SheMtj, tables);
    r.power_reduction = 1.0 - r.she_mtj_mw / r.sram_mw;
    r.sram_devices = device_counts(r.luts, Technology::Sram, tables);
    r.she_mtj_devices = device_counts(r.luts, Technology::SheMtj, tables);
    r.mos_reduction = 1.0 - static_cast<double>(r.she_mtj_devices.mos) / static_cast<double>(r.sram_devices.mos);
    r.reported_sram_mw = rec->topology == topo ? rec->reported_power_mw : NAN;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<Topology> bundled_topologies(const ReferenceTables& tables = ReferenceTables::bundled()) {
  std::vector<Topology> out;
  for (const auto& u : tables.utilization()) out.push_back(u.topology);
  return out;
}

inline void write_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << "topology,luts,sram_mw,she_mtj_mw,power_reduction_pct,sram_mos,she_mtj_mos,she_mtj_mtj,"
         "mos_reduction_pct,reported_sram_mw\n";
  for (const auto& r : rows) {
    out << r.topology.to_string() << ',' << r.luts << ',' << std::fixed << std::setprecision(4) << r.sram_mw << ','
        << r.she_mtj_mw << ',' << std::setprecision(2) << 100.0 * r.power_reduction << ',' << r.sram_devices.mos
        << ',' << r.she_mtj_devices.mos << ',' << r.she_mtj_devices.mtj << ',' << 100.0 * r.mos_reduction << ',';
    if (!std::isnan(r.reported_sram_mw)) out << r.reported_sram_mw;
    out << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

inline void write_table(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << std::left << std::setw(18) << "topology" << std::right << std::setw(7) << "LUTs" << std::setw(12)
      << "SRAM mW" << std::setw(12) << "SHE-MTJ mW" << std::setw(11) << "power -%" << std::setw(12) << "SRAM MOS"
      << std::setw(12) << "SHE MOS" << std::setw(9) << "MTJ" << std::setw(9) << "MOS -%" << std::setw(12)
      << "reported mW" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.topology.to_string() << std::right << std::setw(7) << r.luts << std::fixed
        << std::setprecision(3) << std::setw(12) << r.sram_mw << std::setw(12) << r.she_mtj_mw << std::setprecision(1)
        << std::setw(11) << 100.0 * r.power_reduction << std::setw(12) << r.sram_devices.mos << std::setw(12)
        << r.she_mtj_devices.mos << std::setw(9) << r.she_mtj_devices.mtj << std::setw(9) << 100.0 * r.mos_reduction;
    if (std::isnan(r.reported_sram_mw)) {
      out << std::setw(12) << "-";
    } else {
      out << std::setprecision(2) << std::setw(12) << r.reported_sram_mw;
    }
    out << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

}  // namespace snra::power
