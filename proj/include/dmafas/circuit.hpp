#pragma once

#include <Eigen/LU>
#include <string>
#include <vector>

#include "dmafas/admittance.hpp"
#include "dmafas/core.hpp"

namespace dmafas {

/// Per-slot diode state. `true` means the diode is OFF and the slot radiates;
/// `false` means the diode is ON and shorts the slot out of the network.
class DiodeConfig {
public:
  DiodeConfig() = default;
  explicit DiodeConfig(std::vector<bool> radiating);

  static DiodeConfig all_radiating(std::size_t num_slots);
  /// `active` lists 1-based slot numbers.
  static DiodeConfig from_active_slots(const std::vector<int> &active, std::size_t num_slots);
  /// '1' = radiating, slot 1 first.
  static DiodeConfig from_bits(const std::string &bits);

  std::size_t size() const { return radiating_.size(); }
  bool radiating(std::size_t n) const { return radiating_[n]; }
  std::size_t num_active() const;
  std::vector<Index> active_indices() const;
  std::string bits() const;

  friend bool operator==(const DiodeConfig &, const DiodeConfig &) = default;

private:
  std::vector<bool> radiating_;
};

/// Load admittances attached to the network: per-slot Y_s (full length N_t),
/// generator admittance and the far-end termination.
struct LoadSpec {
  CVec ys;
  Complex yg;
  Termination termination;
  Complex yd{1.0, 0.0}; // device load admittance
};

/// LoadSpec implied by a design: Y_rad on every slot, its generator and termination.
LoadSpec design_loads(const DmaDesign &design);
LoadSpec design_loads(const DmaDesign &design, const DeviceLayout &devices);

/// Network with ON slots removed and the far-end termination folded in.
struct ConfiguredNetwork {
  DmaDesign design;
  AdmittanceSet admittances;
  DiodeConfig config;
  std::vector<Index> active;
  CVec ys_active;
  Complex yg;
  Complex yd;
  Termination termination;

  // Transmit side, restricted to active slots.
  CMat yss_active;  // Yss
  CMat yss_t;       // Yss with the load correction
  CMat ysr_t;       // Ysr with the load correction
  CMat ysl_active;  // Ysl rows of active slots
  CMat yds_active;  // device-to-active-slot channel
  CMat load_inv;    // (Y_l I + Yll)^{-1}, empty for a short
  Eigen::PartialPivLU<CMat> slot_lu; // factorization of Y_s + yss_t
  CMat yp;          // input admittance seen from Port 1

  // Receive side counterparts (Port 1 loaded by the generator admittance).
  CMat yss_h;
  CMat ysl_t;
  CMat yq;          // empty for a short
  Eigen::PartialPivLU<CMat> slot_lu_rx;

  double rcond = 0.0; // reciprocal condition estimate of Y_s + yss_t, rows equilibrated

  Index num_active() const { return static_cast<Index>(active.size()); }
  Index num_waveguides() const { return admittances.num_waveguides(); }
};

/// Reciprocal condition number below which a factorization is rejected.
inline constexpr double singular_rcond = 1e-13;

ConfiguredNetwork configure(const AdmittanceSet &set, const DiodeConfig &config,
                            const DmaDesign &design);
ConfiguredNetwork configure(const AdmittanceSet &set, const DiodeConfig &config,
                            const DmaDesign &design, const LoadSpec &loads);

const CMat &input_admittance(const ConfiguredNetwork &net);

struct TxPowers {
  double supplied = 0.0;    // P_s
  double transmitted = 0.0; // P_r
  double slot = 0.0;        // P_slot
  double load = 0.0;        // P_l
  double radiated = 0.0;    // P_rad
};

struct TxSolution {
  CVec j_g, j_r, v_r;
  CVec j_s;       // active slots, ordered as ConfiguredNetwork::active
  CVec j_s_full;  // all slots, zero where the diode is ON
  CVec j_l, j_d;
  CMat reflection; // (Y_g I - Y_p)(Y_g I + Y_p)^{-1}
  Complex gamma;   // reflection(0, 0); the S11 of a single-guide DMA
  TxPowers powers;
};

TxSolution solve_tx(const ConfiguredNetwork &net, const CVec &j_g);

struct RxSolution {
  CVec j_d;  // device currents driven by the supplied currents
  CVec j_s;  // active slots
  CVec j_r;  // received at Port 1
  CVec j_l;  // received at Port 2 (zero for a short)
  double p_rx = 0.0;
};

RxSolution solve_rx(const ConfiguredNetwork &net, const CVec &j_g_devices);

/// Transfer from the Norton source current (Y_g j_g) at Port 1 to the device currents.
CMat transmit_transfer(const ConfiguredNetwork &net);
/// Transfer from the device Norton source currents (Y_d j_g) to the Port-1 current.
CMat receive_transfer(const ConfiguredNetwork &net);

/// Radiated magnetic field at global point r (full dyadic, near zone included).
CVec3 radiated_field(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r);

/// Far-zone z component (1/R term only).
Complex far_field_z(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r);

/// Field inside waveguide `w` at local point r_q: Port 1, Port 2 and slot contributions.
Complex waveguide_field(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r_q,
                        int w = 0);

/// Directivity at far-zone point r; throws ZeroRadiatedPower if nothing is radiated.
double directivity(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r);

} // namespace dmafas
