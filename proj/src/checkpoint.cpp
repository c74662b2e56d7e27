#include "mhdbl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mhdbl/errors.hpp"

namespace mhdbl {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'H', 'D', 'B', 'L', 'C', 'H', 'K'};

class Writer {
 public:
  explicit Writer(const std::string& path) : os_(path, std::ios::binary | std::ios::trunc) {
    if (!os_) throw FormatError("cannot open checkpoint for writing: " + path);
  }
  template <class T>
  void put(T v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_field(const Field& f) {
    os_.write(reinterpret_cast<const char*>(f.coeffs().data()),
              static_cast<std::streamsize>(f.coeffs().size() * sizeof(cplx)));
  }
  void raw(const char* p, std::size_t n) { os_.write(p, static_cast<std::streamsize>(n)); }
  void finish() {
    os_.flush();
    if (!os_) throw FormatError("checkpoint write failed");
  }

 private:
  std::ofstream os_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : is_(path, std::ios::binary) {
    if (!is_) throw FormatError("cannot open checkpoint: " + path);
  }
  template <class T>
  T get() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is_) throw FormatError("checkpoint truncated");
    return v;
  }
  void get_field(Field& f) {
    is_.read(reinterpret_cast<char*>(f.coeffs().data()), static_cast<std::streamsize>(f.coeffs().size() * sizeof(cplx)));
    if (!is_) throw FormatError("checkpoint truncated");
  }
  void raw(char* p, std::size_t n) {
    is_.read(p, static_cast<std::streamsize>(n));
    if (!is_) throw FormatError("checkpoint truncated");
  }
  bool at_end() { return is_.peek() == std::char_traits<char>::eof(); }

 private:
  std::ifstream is_;
};

}  // namespace

void write_checkpoint(const std::string& path, const Model& m, const RunOptions& o, const State& s,
                      const Diagnostics& d) {
  Writer w(path);
  w.raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  const auto& p = m.params;
  for (double v : {p.kappa, p.epsilon, p.delta, p.lambda, p.bbar(), p.nu_u, p.nu_b}) w.put(v);
  const auto& g = m.grid;
  w.put(g.lx);
  w.put<std::int32_t>(g.nx);
  w.put(g.ymax);
  w.put<std::int32_t>(g.ny);
  w.put(g.dealias_fraction);
  w.put(m.weight_a);
  for (double v : {o.t_final, o.dt_max, o.cfl, o.sample_interval, o.tail_guard}) w.put(v);
  w.put<std::int32_t>(o.audit_every);
  w.put(m.farfield.amplitude());
  w.put(m.farfield.alpha());
  for (const auto& c : m.farfield.profile()) w.put(c);

  w.put(s.t);
  w.put(s.theta);
  w.put(s.dt_prev);
  w.put<std::int64_t>(s.step);
  w.put<std::uint8_t>(s.has_history ? 1 : 0);
  w.put_field(s.u);
  w.put_field(s.b);
  w.put_field(s.nu_prev);
  w.put_field(s.nb_prev);

  w.put<std::uint64_t>(d.series.size());
  for (const auto& r : d.series)
    for (double v : {r.t, r.theta, r.radius, r.norm_ub, r.norm_gh, r.norm_dy_gh, r.norm_phipsi, r.cl_dyub_sq,
                     r.gh_integral, r.flux})
      w.put(v);
  w.put<std::int32_t>(d.cl_dyub.k_min());
  w.put(d.cl_dyub.s());
  w.put(d.cl_dyub.p());
  w.put<std::uint64_t>(d.cl_dyub.sums().size());
  for (double v : d.cl_dyub.sums()) w.put(v);
  w.put(d.gh_integral);
  w.put(d.audit_min_slack);
  w.put(d.audit_min_margin);
  w.put<std::int64_t>(d.audit_count);
  w.finish();
}

Checkpoint read_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError("not a checkpoint file: " + path);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint version " + std::to_string(version) + " not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  Checkpoint c;
  c.params.kappa = r.get<double>();
  c.params.epsilon = r.get<double>();
  c.params.delta = r.get<double>();
  c.params.lambda = r.get<double>();
  const double bbar = r.get<double>();
  c.params.nu_u = r.get<double>();
  c.params.nu_b = r.get<double>();
  if (bbar != c.params.bbar()) throw FormatError("checkpoint background field inconsistent with kappa");
  c.grid.lx = r.get<double>();
  c.grid.nx = r.get<std::int32_t>();
  c.grid.ymax = r.get<double>();
  c.grid.ny = r.get<std::int32_t>();
  c.grid.dealias_fraction = r.get<double>();
  try {
    c.grid.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint grid invalid: ") + e.what());
  }
  c.weight_a = r.get<double>();
  c.run.t_final = r.get<double>();
  c.run.dt_max = r.get<double>();
  c.run.cfl = r.get<double>();
  c.run.sample_interval = r.get<double>();
  c.run.tail_guard = r.get<double>();
  c.run.audit_every = r.get<std::int32_t>();
  c.ff_amplitude = r.get<double>();
  c.ff_alpha = r.get<double>();
  c.ff_profile.resize(c.grid.n_modes());
  for (auto& v : c.ff_profile) v = r.get<cplx>();

  auto& s = c.state;
  s.t = r.get<double>();
  s.theta = r.get<double>();
  s.dt_prev = r.get<double>();
  s.step = r.get<std::int64_t>();
  s.has_history = r.get<std::uint8_t>() != 0;
  s.u = Field(c.grid, Boundary::dirichlet);
  s.b = Field(c.grid, Boundary::neumann);
  s.nu_prev = Field(c.grid, Boundary::dirichlet);
  s.nb_prev = Field(c.grid, Boundary::neumann);
  r.get_field(s.u);
  r.get_field(s.b);
  r.get_field(s.nu_prev);
  r.get_field(s.nb_prev);

  auto& d = c.diag;
  const auto rows = r.get<std::uint64_t>();
  if (rows > (1ull << 32)) throw FormatError("checkpoint series length implausible");
  d.series.resize(rows);
  for (auto& row : d.series)
    for (double* v : {&row.t, &row.theta, &row.radius, &row.norm_ub, &row.norm_gh, &row.norm_dy_gh,
                      &row.norm_phipsi, &row.cl_dyub_sq, &row.gh_integral, &row.flux})
      *v = r.get<double>();
  const int kmin = r.get<std::int32_t>();
  const double cs = r.get<double>();
  const double cp = r.get<double>();
  const auto ns = r.get<std::uint64_t>();
  if (ns > 4096) throw FormatError("checkpoint shell count implausible");
  d.cl_dyub = CLAccumulator(kmin, static_cast<int>(ns), cs, cp);
  for (auto& v : d.cl_dyub.sums()) v = r.get<double>();
  d.gh_integral = r.get<double>();
  d.audit_min_slack = r.get<double>();
  d.audit_min_margin = r.get<double>();
  d.audit_count = r.get<std::int64_t>();
  if (!r.at_end()) throw FormatError("trailing bytes in checkpoint");
  return c;
}

void write_checkpoint(const std::string& path, const Runner& r) {
  write_checkpoint(path, r.model(), r.options(), r.state(), r.diagnostics());
}

Model model_from_checkpoint(const Checkpoint& c) {
  FarField ff = c.ff_amplitude == 0.0 ? FarField::trivial(c.grid)
                                      : FarField::decaying(c.grid, c.params, c.ff_amplitude, c.ff_alpha, c.ff_profile);
  return Model::make(c.grid, c.params, std::move(ff), c.weight_a);
}

}  // namespace mhdbl
