#include "dmafas/fas.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "dmafas/channel.hpp"
#include "dmafas/csv.hpp"

namespace dmafas {

ConfigResponse dma_response(const DmaDesign &design, const AdmittanceSet &set,
                            const DiodeConfig &config) {
  return dma_response(configure(set, config, design));
}

ConfigResponse dma_response(const ConfiguredNetwork &net) {
  if (net.num_waveguides() != 1)
    throw DimensionMismatch("configuration response needs a single waveguide");
  const Complex denom = net.yg + net.yp(0, 0);
  // Y_s + Yss~ is symmetric (reciprocal network), so its transpose shares the factorization.
  const CVec g_active = net.slot_lu.solve(net.ysr_t.col(0)) / denom;
  ConfigResponse r;
  r.g = CVec::Zero(static_cast<Index>(net.config.size()));
  for (Index i = 0; i < net.num_active(); ++i)
    r.g[net.active[i]] = g_active[i];
  r.gamma = (net.yg - net.yp(0, 0)) / denom;
  r.config = net.config;
  return r;
}

Complex effective_channel(const ConfigResponse &resp, const CVec &y) {
  if (resp.g.size() != y.size())
    throw DimensionMismatch("channel length " + std::to_string(y.size()) +
                            " does not match response length " + std::to_string(resp.g.size()));
  return (resp.g.transpose() * y).value();
}

CMat response_matrix(const std::vector<ConfigResponse> &responses) {
  if (responses.empty())
    throw EmptyCodebook("no configuration responses");
  const Index n = responses.front().g.size();
  CMat g(static_cast<Index>(responses.size()), n);
  for (std::size_t u = 0; u < responses.size(); ++u) {
    if (responses[u].g.size() != n)
      throw DimensionMismatch("responses have different lengths");
    g.row(static_cast<Index>(u)) = responses[u].g.transpose();
  }
  return g;
}

FasCovariance fas_covariance(const std::vector<ConfigResponse> &responses, const CMat &sigma_y) {
  return fas_covariance(response_matrix(responses), sigma_y);
}

FasCovariance fas_covariance(const CMat &g, const CMat &sigma_y) {
  if (g.cols() != sigma_y.rows())
    throw DimensionMismatch("response matrix and channel covariance disagree in size");
  check_psd(sigma_y, "channel covariance");
  FasCovariance c;
  c.sigma = g * sigma_y * g.adjoint();
  c.sigma = 0.5 * (c.sigma + c.sigma.adjoint()).eval();
  c.rho = correlation_matrix(c.sigma);
  c.eigenvalues = eigen_spectrum(c.sigma);
  return c;
}

CMat correlation_matrix(const CMat &sigma) {
  const Index n = sigma.rows();
  RVec d(n);
  for (Index i = 0; i < n; ++i) {
    const double v = sigma(i, i).real();
    if (!(v > 0.0))
      throw ZeroDiagonal("covariance diagonal entry " + std::to_string(i) + " is not positive");
    d[i] = 1.0 / std::sqrt(v);
  }
  return d.asDiagonal() * sigma * d.asDiagonal();
}

RVec eigen_spectrum(const CMat &sigma) {
  Eigen::SelfAdjointEigenSolver<CMat> es(sigma, Eigen::EigenvaluesOnly);
  RVec ev = es.eigenvalues().reverse();
  return ev;
}

int dominant_count(const RVec &descending, double fraction) {
  if (descending.size() == 0)
    return 0;
  const double cut = fraction * descending[0];
  return static_cast<int>(std::count_if(descending.begin(), descending.end(),
                                        [cut](double v) { return v > cut; }));
}

void write_matrix_csv(const std::filesystem::path &path, const CMat &m) {
  csv::Writer w(path, {"u", "utilde", "re", "im"});
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      w.row(i, j, m(i, j).real(), m(i, j).imag());
}

void write_eigen_csv(const std::filesystem::path &path, const RVec &descending) {
  csv::Writer w(path, {"k", "lambda", "lambda_normalized"});
  const double top = descending.size() ? descending[0] : 1.0;
  for (Index k = 0; k < descending.size(); ++k)
    w.row(k, descending[k], top != 0.0 ? descending[k] / top : 0.0);
}

} // namespace dmafas
