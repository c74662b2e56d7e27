#pragma once

// Binary checkpoint: little-endian, versioned header followed by raw field
// arrays (y-major, then x-frequency, re/im pairs of 64-bit floats).
//
//   "MHDBLCHK" u32 version
//   params  : kappa epsilon delta lambda bbar nu_u nu_b       (f64)
//   grid    : lx (f64) nx (i32) ymax (f64) ny (i32) dealias (f64)
//   model   : weight_a (f64)
//   run     : t_final dt_max cfl sample_interval tail_guard (f64) audit_every (i32)
//   farfield: amplitude, alpha (f64), profile (nm c128)
//   state   : t theta dt_prev (f64) step (i64) has_history (u8)
//   fields  : u b nu_prev nb_prev
//   diag    : series rows, accumulator sums, gh integral, audit stats

#include <string>

#include "mhdbl/run.hpp"

namespace mhdbl {

inline constexpr unsigned kCheckpointVersion = 1;

struct Checkpoint {
  GridSpec grid;
  Params params;
  double weight_a = 1.0;
  RunOptions run;
  double ff_amplitude = 0.0;
  double ff_alpha = 0.0;
  std::vector<cplx> ff_profile;
  State state;
  Diagnostics diag;
};

void write_checkpoint(const std::string& path, const Model& m, const RunOptions& o, const State& s,
                      const Diagnostics& d);
void write_checkpoint(const std::string& path, const Runner& r);
// Throws FormatError on a bad magic, version mismatch or truncated file.
Checkpoint read_checkpoint(const std::string& path);

// Rebuild the model a checkpoint was written with.
Model model_from_checkpoint(const Checkpoint& c);

}  // namespace mhdbl
