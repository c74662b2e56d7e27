#include "mhdbl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mhdbl {

namespace {

double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// C^infinity step from 0 (s <= 0) to 1 (s >= 1).
double transition(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = glue(s);
  return a / (a + glue(1.0 - s));
}

constexpr double kChiLow = 3.0 / 4.0;
constexpr double kChiHigh = 4.0 / 3.0;

}  // namespace

double lp_chi(double tau) {
  tau = std::abs(tau);
  if (tau <= kChiLow) return 1.0;
  if (tau >= kChiHigh) return 0.0;
  return 1.0 - transition((tau - kChiLow) / (kChiHigh - kChiLow));
}

double lp_phi(double tau) { return lp_chi(0.5 * tau) - lp_chi(tau); }

DyadicPartition DyadicPartition::build(const GridSpec& grid) {
  grid.validate();
  DyadicPartition p;
  p.grid_ = grid;
  const int nm = grid.n_modes();
  const double xi_min = grid.xi(1);
  const double xi_max = grid.xi(nm - 1);
  const int lo = static_cast<int>(std::floor(std::log2(3.0 * xi_min / 8.0)));
  const int hi = static_cast<int>(std::ceil(std::log2(8.0 * xi_max / 3.0)));

  int first = hi + 1;
  int last = lo - 1;
  std::vector<std::vector<double>> rows;
  for (int k = lo; k <= hi; ++k) {
    std::vector<double> row(nm, 0.0);
    bool any = false;
    for (int j = 1; j < nm; ++j) {
      row[j] = lp_phi(std::ldexp(grid.xi(j), -k));
      any = any || row[j] != 0.0;
    }
    if (any) {
      first = std::min(first, k);
      last = std::max(last, k);
    }
    rows.push_back(std::move(row));
  }
  p.k_min_ = first;
  p.k_max_ = last;
  for (int k = first; k <= last; ++k) {
    const auto& row = rows[k - lo];
    p.table_.insert(p.table_.end(), row.begin(), row.end());
  }
  return p;
}

double DyadicPartition::phi(int k, int j) const {
  if (k < k_min_ || k > k_max_) return 0.0;
  return table_[static_cast<std::size_t>(k - k_min_) * grid_.n_modes() + j];
}

double DyadicPartition::chi(int k, int j) const { return lp_chi(std::ldexp(grid_.xi(j), -k)); }

std::span<const double> DyadicPartition::phi_row(int k) const {
  if (k < k_min_ || k > k_max_) throw std::out_of_range("shell index outside partition");
  return {table_.data() + static_cast<std::size_t>(k - k_min_) * grid_.n_modes(),
          static_cast<std::size_t>(grid_.n_modes())};
}

Field lp_project(const DyadicPartition& p, const Field& f, int k) {
  Field out(f.grid(), f.boundary());
  if (k < p.k_min() || k > p.k_max()) return out;
  const auto row = p.phi_row(k);
  for (int i = 0; i < f.ny(); ++i)
    for (int j = 0; j < f.nm(); ++j) out(i, j) = row[j] * f(i, j);
  return out;
}

Field lowpass(const DyadicPartition& p, const Field& f, int k) {
  Field out(f.grid(), f.boundary());
  std::vector<double> row(f.nm());
  for (int j = 0; j < f.nm(); ++j) row[j] = p.chi(k, j);
  for (int i = 0; i < f.ny(); ++i)
    for (int j = 0; j < f.nm(); ++j) out(i, j) = row[j] * f(i, j);
  return out;
}

std::vector<double> shell_norms(const DyadicPartition& p, std::span<const Field* const> fields, const Weighting& w) {
  const auto& g = p.grid();
  const int nm = g.n_modes();
  std::vector<double> energy(nm, 0.0);
  for (const Field* f : fields) {
    const auto e = weighted_mode_energy(*f, w.a, w.t);
    for (int j = 0; j < nm; ++j) energy[j] += e[j];
  }
  std::vector<double> gevrey(nm);
  for (int j = 0; j < nm; ++j) gevrey[j] = std::exp(2.0 * w.radius * g.xi(j));

  std::vector<double> out(p.n_shells(), 0.0);
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const auto row = p.phi_row(k);
    double s = 0.0;
    for (int j = 1; j < nm; ++j) {
      if (row[j] == 0.0) continue;
      s += mode_multiplicity(g, j) * row[j] * row[j] * gevrey[j] * energy[j];
    }
    out[k - p.k_min()] = std::sqrt(g.lx * s);
  }
  return out;
}

std::vector<double> shell_norms(const DyadicPartition& p, const Field& f, const Weighting& w) {
  const Field* fs[] = {&f};
  return shell_norms(p, fs, w);
}

double besov_norm(const DyadicPartition& p, std::span<const Field* const> fields, double s, const Weighting& w) {
  const auto n = shell_norms(p, fields, w);
  double sum = 0.0;
  for (int k = p.k_min(); k <= p.k_max(); ++k) sum += std::exp2(k * s) * n[k - p.k_min()];
  return sum;
}

double besov_norm(const DyadicPartition& p, const Field& f, double s, const Weighting& w) {
  const Field* fs[] = {&f};
  return besov_norm(p, fs, s, w);
}

double besov_norm(const DyadicPartition& p, const Field& f, const Field& g, double s, const Weighting& w) {
  const Field* fs[] = {&f, &g};
  return besov_norm(p, fs, s, w);
}

double besov_h_norm(const DyadicPartition& p, std::span<const cplx> modes, double s, double radius) {
  const auto& g = p.grid();
  if (modes.size() != static_cast<std::size_t>(g.n_modes())) throw std::invalid_argument("profile mode count mismatch");
  double sum = 0.0;
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const auto row = p.phi_row(k);
    double e = 0.0;
    for (int j = 1; j < g.n_modes(); ++j) {
      if (row[j] == 0.0) continue;
      e += mode_multiplicity(g, j) * row[j] * row[j] * std::exp(2.0 * radius * g.xi(j)) * std::norm(modes[j]);
    }
    sum += std::exp2(k * s) * std::sqrt(g.lx * e);
  }
  return sum;
}

Field gevrey_multiplier(const Field& f, double r) {
  if (r < 0.0) throw std::invalid_argument("Gevrey radius must be nonnegative");
  const auto& g = f.grid();
  if (r * g.xi(g.n_modes() - 1) > 700.0) throw std::overflow_error("Gevrey radius too large for the grid");
  Field out = f;
  for (int j = 0; j < g.n_modes(); ++j) {
    const double m = std::exp(r * g.xi(j));
    for (int i = 0; i < g.ny; ++i) out(i, j) *= m;
  }
  return out;
}

Field dealiased_product(const Field& f, const Field& g) {
  auto pf = inverse(f);
  const auto pg = inverse(g);
  for (std::size_t n = 0; n < pf.values.size(); ++n) pf.values[n] *= pg.values[n];
  Field out = forward(pf, f.boundary());
  dealias(out);
  return out;
}

namespace {

// Mean part of f (xi = 0 only).
Field mean_part(const Field& f) {
  Field out(f.grid(), f.boundary());
  for (int i = 0; i < f.ny(); ++i) out(i, 0) = f(i, 0);
  return out;
}

}  // namespace

Paraproduct paraproduct(const DyadicPartition& p, const Field& f, const Field& g) {
  const auto& grid = f.grid();
  const std::size_t npts = static_cast<std::size_t>(grid.nx) * grid.ny;
  std::vector<double> acc_tfg(npts, 0.0), acc_tgf(npts, 0.0), acc_r(npts, 0.0);

  // physical-space blocks, index 0 = mean, then shells k_min..k_max
  const int nb = p.n_shells() + 1;
  std::vector<PhysicalField> fb, gb;
  fb.reserve(nb);
  gb.reserve(nb);
  fb.push_back(inverse(mean_part(f)));
  gb.push_back(inverse(mean_part(g)));
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    fb.push_back(inverse(lp_project(p, f, k)));
    gb.push_back(inverse(lp_project(p, g, k)));
  }

  // low_f[b] = mean + sum of shells strictly below block b - 1 (S_{k-1})
  auto low_sum = [&](const std::vector<PhysicalField>& blocks, int b) {
    std::vector<double> s(blocks[0].values);
    for (int c = 1; c <= b - 2; ++c)
      for (std::size_t n = 0; n < npts; ++n) s[n] += blocks[c].values[n];
    return s;
  };

  for (int b = 1; b < nb; ++b) {
    const auto sf = low_sum(fb, b);
    const auto sg = low_sum(gb, b);
    for (std::size_t n = 0; n < npts; ++n) {
      acc_tfg[n] += sf[n] * gb[b].values[n];
      acc_tgf[n] += sg[n] * fb[b].values[n];
    }
    for (int c = std::max(1, b - 1); c <= std::min(nb - 1, b + 1); ++c)
      for (std::size_t n = 0; n < npts; ++n) acc_r[n] += fb[b].values[n] * gb[c].values[n];
  }
  for (std::size_t n = 0; n < npts; ++n) acc_r[n] += fb[0].values[n] * gb[0].values[n];

  auto finish = [&](std::vector<double>& acc) {
    Field out = forward(PhysicalField{grid, std::move(acc)}, f.boundary());
    dealias(out);
    return out;
  };
  return Paraproduct{finish(acc_tfg), finish(acc_tgf), finish(acc_r)};
}

CLAccumulator::CLAccumulator(int k_min, int n_shells, double s, double p)
    : k_min_(k_min), s_(s), p_(p), sums_(n_shells, 0.0) {
  if (!(p == infinity_p || p >= 1.0)) throw std::invalid_argument("Chemin-Lerner exponent must be >= 1 or infinity");
}

void CLAccumulator::add(std::span<const double> shell_norms, double dt, double weight) {
  if (shell_norms.size() != sums_.size()) throw std::invalid_argument("shell count mismatch");
  for (std::size_t k = 0; k < sums_.size(); ++k) {
    if (p_ == infinity_p)
      sums_[k] = std::max(sums_[k], weight * shell_norms[k]);
    else
      sums_[k] += weight * dt * std::pow(shell_norms[k], p_);
  }
}

double CLAccumulator::norm() const {
  double total = 0.0;
  for (std::size_t k = 0; k < sums_.size(); ++k) {
    const double per_shell = p_ == infinity_p ? sums_[k] : std::pow(sums_[k], 1.0 / p_);
    total += std::exp2((k_min_ + static_cast<int>(k)) * s_) * per_shell;
  }
  return total;
}

}  // namespace mhdbl
