#include "dmafas/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "dmafas/csv.hpp"
#include "dmafas/greens.hpp"

namespace dmafas {

using constants::pi;

namespace {

constexpr double tie_tolerance = 1e-12;

struct Best {
  double value = -1.0;
  std::uint64_t key = 0;
};

// Larger field wins; near-equal fields go to the smaller key (lexicographically smaller bits).
bool better(double v, std::uint64_t key, const Best &b) {
  if (b.value < 0.0)
    return true;
  if (std::abs(v - b.value) <= tie_tolerance * std::max(v, b.value))
    return key < b.key;
  return v > b.value;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// Slot n maps to bit (N - 1 - n), so numeric order of keys matches the bit strings.
DiodeConfig config_from_key(std::uint64_t key, int n) {
  std::vector<bool> r(n);
  for (int i = 0; i < n; ++i)
    r[i] = (key >> (n - 1 - i)) & 1u;
  return DiodeConfig(std::move(r));
}

std::vector<std::uint64_t> enumerate_keys(int n, int k) {
  std::vector<std::uint64_t> keys;
  keys.reserve(binomial(n, k));
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t v = (std::uint64_t{1} << k) - 1; v < end;) {
    keys.push_back(v);
    if (k == 0)
      break;
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
  return keys;
}

// Termination-resolved blocks shared by every mask of a single-guide design.
struct Reduced {
  CMat yss_t;
  CVec ysr_t;
  Complex yrr_eff;
  CVec ys;
  Complex yg;
};

Reduced reduce_termination(const DmaDesign &design, const AdmittanceSet &set) {
  Reduced r;
  const LoadSpec loads = design_loads(design);
  r.ys = loads.ys;
  r.yg = loads.yg;
  r.yss_t = set.yss;
  r.ysr_t = set.ysr.col(0);
  r.yrr_eff = set.yrr(0, 0);
  if (!is_short(loads.termination)) {
    const Complex den = std::get<Load>(loads.termination).admittance + set.yll(0, 0);
    if (std::abs(den) == 0.0)
      throw SingularSolve("load termination (Y_l + Yll) is singular");
    const CVec ysl = set.ysl.col(0);
    r.yss_t -= ysl * ysl.transpose() / den;
    r.ysr_t -= ysl * (set.ylr(0, 0) / den);
    r.yrr_eff -= set.ylr(0, 0) * set.ylr(0, 0) / den;
  }
  return r;
}

struct ChunkResult {
  std::vector<Best> best;
  std::uint64_t visited = 0;
  std::uint64_t skipped = 0;
};

void search_chunk(const Reduced &red, const CMat &kernel, const std::vector<std::uint64_t> &keys,
                  std::size_t begin, std::size_t end, int n, int k, ChunkResult &out) {
  const Index nphi = kernel.rows();
  out.best.assign(nphi, Best{});
  std::vector<Index> idx(k);
  CMat a(k, k);
  CVec b(k), x(k), h(nphi);
  CMat ksub(nphi, k);
  Eigen::PartialPivLU<CMat> lu(k);
  for (std::size_t m = begin; m < end; ++m) {
    const std::uint64_t key = keys[m];
    for (int i = 0, c = 0; i < n; ++i)
      if ((key >> (n - 1 - i)) & 1u)
        idx[c++] = i;
    a = red.yss_t(idx, idx);
    a.diagonal() += red.ys(idx);
    b = red.ysr_t(idx);
    lu.compute(a);
    ++out.visited;
    if (!(lu.rcond() >= singular_rcond)) {
      ++out.skipped;
      continue;
    }
    x.noalias() = lu.solve(b);
    const Complex yp = red.yrr_eff - (b.transpose() * x).value();
    const Complex jr = 2.0 * red.yg / (red.yg + yp);
    ksub = kernel(Eigen::all, idx);
    h.noalias() = ksub * x;
    const double scale = std::abs(jr);
    for (Index p = 0; p < nphi; ++p) {
      const double v = std::abs(h[p]) * scale;
      if (better(v, key, out.best[p]))
        out.best[p] = {v, key};
    }
  }
}

} // namespace

std::vector<double> default_phi_grid(int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = i * pi / count;
  return g;
}

Codebook design_codebook(const DmaDesign &design, const AdmittanceSet &set,
                         const CodebookOptions &opts) {
  if (set.num_waveguides() != 1)
    throw DimensionMismatch("codebook search needs a single waveguide");
  const int n = static_cast<int>(set.num_slots());
  const int k = opts.n_active;
  if (k < 1 || k > n)
    throw InputError("n_active must lie in [1, " + std::to_string(n) + "]");
  if (n > 62)
    throw InputError("codebook search supports at most 62 slots");
  const std::vector<double> grid = opts.phi_grid.empty() ? default_phi_grid() : opts.phi_grid;
  for (double phi : grid)
    if (!(phi >= 0.0 && phi < pi))
      throw InputError("codebook angles must lie in [0, pi)");

  const double k0 = design.medium.k0();
  const double radius = opts.far_radius > 0.0 ? opts.far_radius : 1000.0 * 2.0 * pi / k0;
  const Index nphi = static_cast<Index>(grid.size());
  CMat kernel(nphi, n);
  for (Index p = 0; p < nphi; ++p) {
    const Vec3 r(radius * std::cos(grid[p]), radius * std::sin(grid[p]), 0.0);
    for (int i = 0; i < n; ++i)
      kernel(p, i) = ga_zz_far(r, design.slots.positions[i], k0);
  }
  const Reduced red = reduce_termination(design, set);
  const auto keys = enumerate_keys(n, k);

  // Fixed chunking merged in order keeps the result independent of the thread count.
  const std::size_t num_chunks = std::min<std::size_t>(64, keys.size());
  std::vector<ChunkResult> chunks(num_chunks);
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, num_chunks));
  auto run = [&](unsigned t) {
    for (std::size_t c = t; c < num_chunks; c += threads)
      search_chunk(red, kernel, keys, c * keys.size() / num_chunks,
                   (c + 1) * keys.size() / num_chunks, n, k, chunks[c]);
  };
  if (threads <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(run, t);
  }

  Codebook book;
  std::vector<Best> best(nphi);
  for (const auto &c : chunks) {
    book.masks_visited += c.visited;
    book.masks_skipped += c.skipped;
    for (Index p = 0; p < nphi; ++p)
      if (c.best[p].value >= 0.0 && better(c.best[p].value, c.best[p].key, best[p]))
        best[p] = c.best[p];
  }

  const double prefactor =
      2.0 * design.slots.dipole_length * design.medium.omega() * constants::eps0;
  std::vector<std::uint64_t> order;
  for (Index p = 0; p < nphi; ++p) {
    if (best[p].value < 0.0)
      continue;
    const auto it = std::find(order.begin(), order.end(), best[p].key);
    std::size_t e = it - order.begin();
    if (it == order.end()) {
      order.push_back(best[p].key);
      CodebookEntry entry;
      entry.config = config_from_key(best[p].key, n);
      book.entries.push_back(std::move(entry));
    }
    auto &entry = book.entries[e];
    entry.won_angles.push_back(grid[p]);
    entry.field_strength = std::max(entry.field_strength, prefactor * best[p].value);
  }

  CVec jg(1);
  jg[0] = 1.0;
  for (auto &entry : book.entries) {
    // Centre of the first run of consecutive grid angles won by this entry.
    const auto first = std::find(grid.begin(), grid.end(), entry.won_angles.front());
    auto last = first;
    std::size_t w = 0;
    while (last != grid.end() && w < entry.won_angles.size() && *last == entry.won_angles[w]) {
      ++last;
      ++w;
    }
    entry.target_phi = 0.5 * (*first + *(last - 1));

    const auto net = configure(set, entry.config, design);
    const auto sol = solve_tx(net, jg);
    entry.gamma = sol.gamma;
    entry.radiation_efficiency = sol.powers.radiated / sol.powers.supplied;
  }
  return book;
}

Codebook reduce_codebook(const Codebook &book, std::size_t count) {
  if (book.entries.empty() || count == 0)
    throw EmptyCodebook("cannot reduce an empty codebook or to zero entries");
  if (count >= book.size())
    return book;
  Codebook out;
  out.masks_visited = book.masks_visited;
  out.masks_skipped = book.masks_skipped;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < count; ++i) {
    const double target = (i + 0.5) * pi / static_cast<double>(count);
    std::size_t arg = 0;
    double dist = INFINITY;
    for (std::size_t e = 0; e < book.size(); ++e) {
      const auto &won = book.entries[e].won_angles;
      double d = std::abs(book.entries[e].target_phi - target);
      for (double phi : won)
        d = std::min(d, std::abs(phi - target));
      if (d < dist) {
        dist = d;
        arg = e;
      }
    }
    if (std::find(picked.begin(), picked.end(), arg) == picked.end())
      picked.push_back(arg);
  }
  std::sort(picked.begin(), picked.end());
  for (std::size_t e : picked)
    out.entries.push_back(book.entries[e]);
  return out;
}

void write_codebook_csv(const std::filesystem::path &path, const Codebook &book) {
  csv::Writer w(path, {"entry_id", "target_phi_deg", "mask_bits", "field_strength", "gamma_re",
                       "gamma_im", "efficiency"});
  for (std::size_t e = 0; e < book.size(); ++e) {
    const auto &en = book.entries[e];
    w.row(e, en.target_phi * 180.0 / pi, en.config.bits(), en.field_strength, en.gamma.real(),
          en.gamma.imag(), en.radiation_efficiency);
  }
}

Codebook read_codebook_csv(const std::filesystem::path &path) {
  const auto t = csv::read(path);
  Codebook book;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto &r = t.rows[i];
    const int line = t.line_numbers[i];
    if (r.size() != 7)
      throw InputError(path.string() + ":" + std::to_string(line) + ": expected 7 columns");
    CodebookEntry en;
    en.target_phi = csv::to_double(r[1], path, line) * pi / 180.0;
    en.won_angles = {en.target_phi};
    try {
      en.config = DiodeConfig::from_bits(r[2]);
    } catch (const InputError &e) {
      throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    en.field_strength = csv::to_double(r[3], path, line);
    en.gamma = {csv::to_double(r[4], path, line), csv::to_double(r[5], path, line)};
    en.radiation_efficiency = csv::to_double(r[6], path, line);
    book.entries.push_back(std::move(en));
  }
  if (book.entries.empty())
    throw EmptyCodebook(path.string() + ": no codebook entries");
  return book;
}

} // namespace dmafas
