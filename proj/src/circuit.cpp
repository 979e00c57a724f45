#include "dmafas/circuit.hpp"

#include <cmath>
#include <sstream>

#include "dmafas/greens.hpp"

namespace dmafas {

namespace {

constexpr Complex I(0.0, 1.0);

// rcond after row equilibration, so that large but finite loads do not read as singular.
double scaled_rcond(const CMat &m) {
  const RVec rows = m.cwiseAbs().rowwise().maxCoeff();
  if (!(rows.minCoeff() > 0.0))
    return 0.0;
  return Eigen::PartialPivLU<CMat>(rows.cwiseInverse().cast<Complex>().asDiagonal() * m).rcond();
}

double check_lu(const CMat &m, const char *what) {
  const double rc = scaled_rcond(m);
  if (!(rc >= singular_rcond)) {
    std::ostringstream os;
    os << what << " is numerically singular (rcond = " << rc << ")";
    throw SingularSolve(os.str());
  }
  return rc;
}

Eigen::PartialPivLU<CMat> factor(const CMat &m, const char *what) {
  check_lu(m, what);
  return Eigen::PartialPivLU<CMat>(m);
}

Complex load_admittance(const Termination &t) { return std::get<Load>(t).admittance; }

} // namespace

DiodeConfig::DiodeConfig(std::vector<bool> radiating) : radiating_(std::move(radiating)) {}

DiodeConfig DiodeConfig::all_radiating(std::size_t num_slots) {
  return DiodeConfig(std::vector<bool>(num_slots, true));
}

DiodeConfig DiodeConfig::from_active_slots(const std::vector<int> &active, std::size_t num_slots) {
  std::vector<bool> mask(num_slots, false);
  for (int n : active) {
    if (n < 1 || static_cast<std::size_t>(n) > num_slots)
      throw InputError("active slot " + std::to_string(n) + " outside 1.." +
                       std::to_string(num_slots));
    mask[n - 1] = true;
  }
  return DiodeConfig(std::move(mask));
}

DiodeConfig DiodeConfig::from_bits(const std::string &bits) {
  std::vector<bool> mask;
  mask.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw InputError("mask must contain only '0' and '1': " + bits);
    mask.push_back(c == '1');
  }
  return DiodeConfig(std::move(mask));
}

std::size_t DiodeConfig::num_active() const {
  std::size_t n = 0;
  for (bool b : radiating_)
    n += b;
  return n;
}

std::vector<Index> DiodeConfig::active_indices() const {
  std::vector<Index> idx;
  for (std::size_t n = 0; n < radiating_.size(); ++n)
    if (radiating_[n])
      idx.push_back(static_cast<Index>(n));
  return idx;
}

std::string DiodeConfig::bits() const {
  std::string s;
  s.reserve(radiating_.size());
  for (bool b : radiating_)
    s.push_back(b ? '1' : '0');
  return s;
}

LoadSpec design_loads(const DmaDesign &design) {
  LoadSpec l;
  l.ys = CVec::Constant(static_cast<Index>(design.num_slots()), design.slots.y_rad);
  l.yg = design.ports.y_generator;
  l.termination = design.ports.termination;
  return l;
}

LoadSpec design_loads(const DmaDesign &design, const DeviceLayout &devices) {
  LoadSpec l = design_loads(design);
  l.yd = devices.y_device;
  return l;
}

ConfiguredNetwork configure(const AdmittanceSet &set, const DiodeConfig &config,
                            const DmaDesign &design) {
  return configure(set, config, design, design_loads(design));
}

ConfiguredNetwork configure(const AdmittanceSet &set, const DiodeConfig &config,
                            const DmaDesign &design, const LoadSpec &loads) {
  const Index nt = set.num_slots();
  const Index nw = set.num_waveguides();
  if (static_cast<Index>(config.size()) != nt)
    throw DimensionMismatch("diode mask has " + std::to_string(config.size()) +
                            " entries for " + std::to_string(nt) + " slots");
  if (loads.ys.size() != nt)
    throw DimensionMismatch("slot load vector length does not match the slot count");

  ConfiguredNetwork net;
  net.design = design;
  net.admittances = set;
  net.config = config;
  net.active = config.active_indices();
  if (net.active.empty())
    throw AllSlotsOff("every diode is ON; no slot radiates");
  net.ys_active = loads.ys(net.active);
  net.yg = loads.yg;
  net.yd = loads.yd;
  net.termination = loads.termination;

  const auto all_w = Eigen::all;
  net.yss_active = set.yss(net.active, net.active);
  const CMat ysr = set.ysr(net.active, all_w);
  net.ysl_active = set.ysl(net.active, all_w);
  net.yds_active = set.yds(all_w, net.active);

  if (is_short(net.termination)) {
    net.yss_t = net.yss_active;
    net.ysr_t = ysr;
  } else {
    const CMat lm = load_admittance(net.termination) * CMat::Identity(nw, nw) + set.yll;
    net.load_inv = factor(lm, "load termination (Y_l I + Yll)").inverse();
    net.yss_t = net.yss_active - net.ysl_active * net.load_inv * net.ysl_active.transpose();
    net.ysr_t = ysr - net.ysl_active * net.load_inv * set.ylr;
  }

  CMat a = net.yss_t;
  a.diagonal() += net.ys_active;
  net.rcond = check_lu(a, "slot system (Y_s + Yss)");
  net.slot_lu.compute(a);

  net.yp = set.yrr - net.ysr_t.transpose() * net.slot_lu.solve(net.ysr_t);
  if (!is_short(net.termination))
    net.yp -= set.ylr.transpose() * net.load_inv * set.ylr;

  // Receive side: Port 1 closed on the generator admittance.
  const CMat gen_inv =
      factor(net.yg * CMat::Identity(nw, nw) + set.yrr, "generator (Y_g I + Yrr)").inverse();
  net.yss_h = net.yss_active - ysr * gen_inv * ysr.transpose();
  net.ysl_t = net.ysl_active - ysr * gen_inv * set.ylr.transpose();
  if (!is_short(net.termination)) {
    CMat ah = net.yss_h;
    ah.diagonal() += net.ys_active;
    check_lu(ah, "receive slot system (Y_s + Yss_hat)");
    net.slot_lu_rx.compute(ah);
    net.yq = set.yll - net.ysl_t.transpose() * net.slot_lu_rx.solve(net.ysl_t) -
             set.ylr * gen_inv * set.ylr.transpose();
  }
  return net;
}

const CMat &input_admittance(const ConfiguredNetwork &net) { return net.yp; }

TxSolution solve_tx(const ConfiguredNetwork &net, const CVec &j_g) {
  const Index nw = net.num_waveguides();
  if (j_g.size() != nw)
    throw DimensionMismatch("generator current vector must have one entry per waveguide");
  const CMat id = CMat::Identity(nw, nw);
  const auto input_lu = factor(net.yg * id + net.yp, "input (Y_g I + Y_p)");

  TxSolution s;
  s.j_g = j_g;
  s.j_r = 2.0 * net.yg * input_lu.solve(j_g);
  s.v_r = net.yp * s.j_r;
  s.j_s = -net.slot_lu.solve(net.ysr_t * s.j_r);
  s.j_s_full = CVec::Zero(net.admittances.num_slots());
  s.j_s_full(net.active) = s.j_s;

  if (is_short(net.termination)) {
    s.j_l = CVec::Zero(nw);
  } else {
    s.j_l = -net.load_inv * (net.admittances.ylr * s.j_r + net.ysl_active.transpose() * s.j_s);
  }

  const Index m = net.admittances.num_devices();
  if (m > 0) {
    const CMat dev = net.yd * CMat::Identity(m, m) + net.admittances.ydd;
    s.j_d = -factor(dev, "device (Y_d I + Ydd)").solve(net.yds_active * s.j_s);
  } else {
    s.j_d = CVec(0);
  }

  s.reflection = (net.yg * id - net.yp) * input_lu.inverse();
  s.gamma = s.reflection(0, 0);

  auto &p = s.powers;
  p.supplied = 0.5 * net.yg.real() * j_g.squaredNorm();
  p.transmitted = 0.5 * s.j_r.dot(s.v_r).real(); // dot conjugates the left operand
  p.slot = 0.0;
  for (Index n = 0; n < s.j_s.size(); ++n)
    p.slot += 0.5 * net.ys_active[n].real() * std::norm(s.j_s[n]);
  p.load = is_short(net.termination)
               ? 0.0
               : 0.5 * load_admittance(net.termination).real() * s.j_l.squaredNorm();
  const Eigen::MatrixXd re_yss = net.yss_active.real();
  p.radiated = 0.5 * s.j_s.dot(re_yss.cast<Complex>() * s.j_s).real();
  return s;
}

RxSolution solve_rx(const ConfiguredNetwork &net, const CVec &j_g_devices) {
  const Index m = net.admittances.num_devices();
  const Index nw = net.num_waveguides();
  if (m == 0)
    throw DimensionMismatch("receive solve needs at least one device");
  if (j_g_devices.size() != m)
    throw DimensionMismatch("device current vector must have one entry per device");

  RxSolution s;
  const CMat dev = net.yd * CMat::Identity(m, m) + net.admittances.ydd;
  s.j_d = 2.0 * net.yd * factor(dev, "device (Y_d I + Ydd)").solve(j_g_devices);

  const CVec b = net.yds_active.transpose() * s.j_d;
  const CMat id = CMat::Identity(nw, nw);
  const auto input_lu = factor(net.yg * id + net.yp, "input (Y_g I + Y_p)");
  s.j_r = input_lu.solve(net.ysr_t.transpose() * net.slot_lu.solve(b));
  if (is_short(net.termination)) {
    s.j_l = CVec::Zero(nw);
  } else {
    const CMat lq = load_admittance(net.termination) * id + net.yq;
    s.j_l = factor(lq, "(Y_l I + Y_q)").solve(net.ysl_t.transpose() * net.slot_lu_rx.solve(b));
  }
  s.j_s = -net.slot_lu.solve(net.ysr_t * s.j_r + b);
  s.p_rx = 0.5 * net.yg.real() * s.j_r.squaredNorm();
  return s;
}

CMat transmit_transfer(const ConfiguredNetwork &net) {
  const Index m = net.admittances.num_devices();
  const Index nw = net.num_waveguides();
  const CMat dev = net.yd * CMat::Identity(m, m) + net.admittances.ydd;
  const CMat input_inv = factor(net.yg * CMat::Identity(nw, nw) + net.yp, "input").inverse();
  return 2.0 * factor(dev, "device").solve(net.yds_active * net.slot_lu.solve(net.ysr_t)) *
         input_inv;
}

CMat receive_transfer(const ConfiguredNetwork &net) {
  const Index m = net.admittances.num_devices();
  const Index nw = net.num_waveguides();
  const CMat dev_inv = factor(net.yd * CMat::Identity(m, m) + net.admittances.ydd, "device").inverse();
  const auto input_lu = factor(net.yg * CMat::Identity(nw, nw) + net.yp, "input");
  return 2.0 * input_lu.solve(net.ysr_t.transpose() *
                              net.slot_lu.solve(net.yds_active.transpose())) *
         dev_inv;
}

CVec3 radiated_field(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r) {
  const double k0 = net.design.medium.k0();
  CVec3 h = CVec3::Zero();
  for (std::size_t i = 0; i < net.active.size(); ++i)
    h += ga_dyadic_z(r, net.design.slots.positions[net.active[i]], k0) * sol.j_s[i];
  const double l = net.design.slots.dipole_length;
  return -2.0 * I * l * net.design.medium.omega() * constants::eps0 * h;
}

Complex far_field_z(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r) {
  const double k0 = net.design.medium.k0();
  Complex h = 0.0;
  for (std::size_t i = 0; i < net.active.size(); ++i)
    h += ga_zz_far(r, net.design.slots.positions[net.active[i]], k0) * sol.j_s[i];
  const double l = net.design.slots.dipole_length;
  return -2.0 * I * l * net.design.medium.omega() * constants::eps0 * h;
}

Complex waveguide_field(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r_q,
                        int w) {
  const auto &d = net.design;
  const GreensContext ctx(d.medium, d.geometry);
  Complex sum = gw_finite(r_q, port1_local(d.geometry), ctx) * sol.j_r[w] +
                gw_finite(r_q, port2_local(d.geometry), ctx) * sol.j_l[w];
  for (std::size_t i = 0; i < net.active.size(); ++i) {
    const Index n = net.active[i];
    if (d.slots.waveguide_index[n] != w)
      continue;
    const Vec3 rn = local_coords(d.slots.positions[n], w, d);
    sum += gw_finite(r_q, rn, ctx) * sol.j_s[i];
  }
  const double l = d.slots.dipole_length;
  return -I * l * d.medium.omega() * d.medium.permittivity() * sum;
}

double directivity(const ConfiguredNetwork &net, const TxSolution &sol, const Vec3 &r) {
  const double prad = sol.powers.radiated;
  if (!(prad > 0.0))
    throw ZeroRadiatedPower("radiated power is zero; directivity undefined");
  const CVec3 h = radiated_field(net, sol, r);
  return 0.5 * constants::eta * h.squaredNorm() * 4.0 * constants::pi * r.squaredNorm() / prad;
}

} // namespace dmafas
