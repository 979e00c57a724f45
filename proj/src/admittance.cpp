#include "dmafas/admittance.hpp"

#include <cmath>

#include "dmafas/csv.hpp"
#include "dmafas/greens.hpp"

namespace dmafas {

namespace {

constexpr Complex I(0.0, 1.0);

// i l^2 omega eps, the common prefactor of every mutual admittance.
Complex guide_factor(const DmaDesign &d) {
  const double l = d.slots.dipole_length;
  return I * l * l * d.medium.omega() * d.medium.permittivity();
}

Complex air_factor(const Medium &m, double l) {
  return I * l * l * m.omega() * constants::eps0;
}

} // namespace

PortBlocks build_port_blocks(const DmaDesign &design) {
  const GreensContext ctx(design.medium, design.geometry);
  const Vec3 p1 = port1_local(design.geometry);
  const Vec3 p2 = port2_local(design.geometry);
  const Complex f = guide_factor(design);
  const Index nw = design.num_waveguides;
  // Identical guides: every diagonal entry is the same.
  PortBlocks out;
  out.yrr = CMat::Identity(nw, nw) * (f * gw_finite(p1, p1, ctx));
  out.yll = CMat::Identity(nw, nw) * (f * gw_finite(p2, p2, ctx));
  out.ylr = CMat::Identity(nw, nw) * (f * gw_finite(p2, p1, ctx));
  return out;
}

SlotPortBlocks build_slot_port_blocks(const DmaDesign &design) {
  const GreensContext ctx(design.medium, design.geometry);
  const Vec3 p1 = port1_local(design.geometry);
  const Vec3 p2 = port2_local(design.geometry);
  const Complex f = guide_factor(design);
  const Index nt = static_cast<Index>(design.num_slots());
  const Index nw = design.num_waveguides;
  SlotPortBlocks out{CMat::Zero(nt, nw), CMat::Zero(nt, nw)};
  for (Index n = 0; n < nt; ++n) {
    const int w = design.slots.waveguide_index[n];
    const Vec3 rn = local_coords(design.slots.positions[n], w, design);
    out.ysr(n, w) = f * gw_finite(rn, p1, ctx);
    out.ysl(n, w) = f * gw_finite(rn, p2, ctx);
  }
  return out;
}

CMat build_yss(const DmaDesign &design) {
  const GreensContext ctx(design.medium, design.geometry);
  const Medium &m = design.medium;
  const double l = design.slots.dipole_length;
  const double k0 = m.k0();
  const Complex fg = guide_factor(design);
  const Complex fa = 2.0 * air_factor(m, l); // ground-plane image doubles the air term
  const Index nt = static_cast<Index>(design.num_slots());

  std::vector<Vec3> local(nt);
  for (Index n = 0; n < nt; ++n)
    local[n] = local_coords(design.slots.positions[n], design.slots.waveguide_index[n], design);

  CMat yss(nt, nt);
  const double self_radiation = l * l * k0 * m.omega() * constants::eps0 / (3.0 * constants::pi);
  for (Index n = 0; n < nt; ++n) {
    yss(n, n) = self_radiation + fg * gw_finite(local[n], local[n], ctx);
    for (Index p = 0; p < n; ++p) {
      Complex y = fa * ga_zz(design.slots.positions[n], design.slots.positions[p], k0);
      if (design.slots.waveguide_index[n] == design.slots.waveguide_index[p])
        y += fg * gw_finite(local[n], local[p], ctx);
      yss(n, p) = y;
      yss(p, n) = y;
    }
  }
  return yss;
}

CMat build_ydd(const DeviceLayout &devices, const Medium &medium, double dipole_length) {
  const Index m = static_cast<Index>(devices.size());
  const double l = dipole_length;
  const double k0 = medium.k0();
  const Complex fa = air_factor(medium, l);
  CMat ydd(m, m);
  const double self = l * l * k0 * medium.omega() * constants::eps0 / (6.0 * constants::pi);
  for (Index i = 0; i < m; ++i) {
    ydd(i, i) = self;
    for (Index j = 0; j < i; ++j) {
      const Complex y = fa * ga_zz(devices.positions[i], devices.positions[j], k0);
      ydd(i, j) = y;
      ydd(j, i) = y;
    }
  }
  return ydd;
}

AdmittanceSet assemble(const DmaDesign &design) {
  design.validate();
  auto ports = build_port_blocks(design);
  auto sp = build_slot_port_blocks(design);
  AdmittanceSet s;
  s.yrr = std::move(ports.yrr);
  s.yll = std::move(ports.yll);
  s.ylr = std::move(ports.ylr);
  s.ysr = std::move(sp.ysr);
  s.ysl = std::move(sp.ysl);
  s.yss = build_yss(design);
  s.ydd = CMat(0, 0);
  s.yds = CMat(0, s.yss.rows());
  return s;
}

AdmittanceSet assemble(const DmaDesign &design, const DeviceLayout &devices, const CMat &yds) {
  if (devices.size() == 0)
    throw InvalidDesign("at least one device is required");
  const Index m = static_cast<Index>(devices.size());
  const Index nt = static_cast<Index>(design.num_slots());
  if (yds.rows() != m || yds.cols() != nt)
    throw DimensionMismatch("yds must be " + std::to_string(m) + " x " + std::to_string(nt) +
                            ", got " + std::to_string(yds.rows()) + " x " +
                            std::to_string(yds.cols()));
  AdmittanceSet s = assemble(design);
  s.ydd = build_ydd(devices, design.medium, design.slots.dipole_length);
  s.yds = yds;
  return s;
}

std::vector<std::string> audit(const AdmittanceSet &s, const DmaDesign &design, double tol) {
  std::vector<std::string> v;
  const Index nw = design.num_waveguides;
  const Index nt = static_cast<Index>(design.num_slots());
  auto shape = [&](const char *name, const CMat &m, Index r, Index c) {
    if (m.rows() != r || m.cols() != c)
      v.push_back(std::string(name) + " has shape " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()));
  };
  shape("Yrr", s.yrr, nw, nw);
  shape("Yll", s.yll, nw, nw);
  shape("Ylr", s.ylr, nw, nw);
  shape("Ysr", s.ysr, nt, nw);
  shape("Ysl", s.ysl, nt, nw);
  shape("Yss", s.yss, nt, nt);
  shape("Yds", s.yds, s.ydd.rows(), nt);
  if (!v.empty())
    return v;

  const double scale = s.yss.cwiseAbs().maxCoeff();
  if ((s.yss - s.yss.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    v.push_back("Yss is not symmetric");
  if (s.ydd.size() && (s.ydd - s.ydd.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    v.push_back("Ydd is not symmetric");

  const double l = design.slots.dipole_length;
  const double k0 = design.medium.k0();
  const double w = design.medium.omega();
  const double re_ss = l * l * k0 * w * constants::eps0 / (3.0 * constants::pi);
  for (Index n = 0; n < nt; ++n) {
    if (std::abs(s.yss(n, n).real() - re_ss) > tol * re_ss)
      v.push_back("Re{Yss(" + std::to_string(n) + "," + std::to_string(n) + ")} mismatch");
    for (Index p = 0; p < nw; ++p) {
      if (design.slots.waveguide_index[n] != p && (s.ysr(n, p) != Complex{} || s.ysl(n, p) != Complex{}))
        v.push_back("slot " + std::to_string(n) + " coupled to foreign waveguide " +
                    std::to_string(p));
    }
  }
  for (const CMat *m : {&s.yrr, &s.yll, &s.ylr}) {
    CMat off = *m;
    off.diagonal().setZero();
    if (off.size() && off.cwiseAbs().maxCoeff() > 0.0)
      v.push_back("port block is not diagonal");
  }
  const double re_dd = re_ss / 2.0;
  for (Index i = 0; i < s.ydd.rows(); ++i)
    if (std::abs(s.ydd(i, i).real() - re_dd) > tol * re_dd)
      v.push_back("Re{Ydd(" + std::to_string(i) + "," + std::to_string(i) + ")} mismatch");
  return v;
}

CMat read_yds_csv(const std::filesystem::path &path, Index num_devices, Index num_slots) {
  const auto t = csv::read(path);
  CMat yds = CMat::Zero(num_devices, num_slots);
  std::vector<char> seen(num_devices * num_slots, 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto &r = t.rows[i];
    const int line = t.line_numbers[i];
    if (r.size() != 4)
      throw InputError(path.string() + ":" + std::to_string(line) + ": expected m,n,re,im");
    const long m = csv::to_long(r[0], path, line);
    const long n = csv::to_long(r[1], path, line);
    if (m < 0 || m >= num_devices || n < 0 || n >= num_slots)
      throw DimensionMismatch(path.string() + ":" + std::to_string(line) + ": index out of range");
    yds(m, n) = Complex(csv::to_double(r[2], path, line), csv::to_double(r[3], path, line));
    seen[m * num_slots + n] = 1;
  }
  for (char c : seen)
    if (!c)
      throw DimensionMismatch(path.string() + ": expected " +
                              std::to_string(num_devices * num_slots) + " entries");
  return yds;
}

void write_yds_csv(const std::filesystem::path &path, const CMat &yds) {
  csv::Writer w(path, {"m", "n", "re", "im"});
  for (Index m = 0; m < yds.rows(); ++m)
    for (Index n = 0; n < yds.cols(); ++n)
      w.row(static_cast<long>(m), static_cast<long>(n), yds(m, n).real(), yds(m, n).imag());
}

} // namespace dmafas
