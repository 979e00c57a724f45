#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dmafas/core.hpp"

namespace dmafas {

/// Blocks of the multiport relation between ports, slots and devices.
/// Port blocks are N_w x N_w diagonal; slot blocks are indexed by slot (N_t).
struct AdmittanceSet {
  CMat yrr, yll, ylr; // N_w x N_w
  CMat ysr, ysl;      // N_t x N_w
  CMat yss;           // N_t x N_t
  CMat ydd;           // M x M
  CMat yds;           // M x N_t

  Index num_waveguides() const { return yrr.rows(); }
  Index num_slots() const { return yss.rows(); }
  Index num_devices() const { return ydd.rows(); }
};

struct PortBlocks {
  CMat yrr, yll, ylr;
};
struct SlotPortBlocks {
  CMat ysr, ysl;
};

PortBlocks build_port_blocks(const DmaDesign &design);
SlotPortBlocks build_slot_port_blocks(const DmaDesign &design);
CMat build_yss(const DmaDesign &design);
CMat build_ydd(const DeviceLayout &devices, const Medium &medium, double dipole_length);

/// Full set with an externally supplied channel `yds` (M x N_t).
AdmittanceSet assemble(const DmaDesign &design, const DeviceLayout &devices, const CMat &yds);

/// DMA-only set (no devices): ydd is 0 x 0 and yds is 0 x N_t.
AdmittanceSet assemble(const DmaDesign &design);

/// Invariant audit; returns one message per violation, empty when clean.
std::vector<std::string> audit(const AdmittanceSet &set, const DmaDesign &design,
                               double tol = 1e-10);

/// Reads `m,n,re,im` rows (0-based indices, optional header, '#' comments).
CMat read_yds_csv(const std::filesystem::path &path, Index num_devices, Index num_slots);
void write_yds_csv(const std::filesystem::path &path, const CMat &yds);

} // namespace dmafas
