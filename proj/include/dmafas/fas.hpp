#pragma once

#include <vector>

#include "dmafas/circuit.hpp"

namespace dmafas {

/// Receive response of one diode configuration, embedded at full slot length.
struct ConfigResponse {
  CVec g;        // zeros at ON slots
  Complex gamma; // reflection coefficient at the feed
  DiodeConfig config;
};

/// g^T = (Y_g + Y_p)^{-1} Ysr~^T (Y_s + Yss~)^{-1}. Requires a single waveguide.
ConfigResponse dma_response(const DmaDesign &design, const AdmittanceSet &set,
                            const DiodeConfig &config);
ConfigResponse dma_response(const ConfiguredNetwork &net);

/// h = g^T y.
Complex effective_channel(const ConfigResponse &resp, const CVec &y);

/// Rows g_u^T stacked into a U x N matrix.
CMat response_matrix(const std::vector<ConfigResponse> &responses);

struct FasCovariance {
  CMat sigma;
  CMat rho;
  RVec eigenvalues; // descending
};

/// Sigma_{u,v} = g_u^T Sigma_y conj(g_v).
FasCovariance fas_covariance(const std::vector<ConfigResponse> &responses, const CMat &sigma_y);
FasCovariance fas_covariance(const CMat &g, const CMat &sigma_y);

/// D^{-1/2} Sigma D^{-1/2}; throws ZeroDiagonal on a non-positive diagonal entry.
CMat correlation_matrix(const CMat &sigma);

/// Eigenvalues of a Hermitian matrix, descending.
RVec eigen_spectrum(const CMat &sigma);

/// Number of eigenvalues above `fraction` of the largest.
int dominant_count(const RVec &descending, double fraction = 0.01);

/// Export as `u,utilde,re,im`.
void write_matrix_csv(const std::filesystem::path &path, const CMat &m);
/// Export as `k,lambda,lambda_normalized`.
void write_eigen_csv(const std::filesystem::path &path, const RVec &descending);

} // namespace dmafas
