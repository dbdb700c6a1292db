#pragma once

#include <iosfwd>

#include "flowgrowth/sim.hpp"

namespace flowgrowth::sim {

/// Long-format CSV, header `t,path_id,value`, rows ordered by path then time.
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens);

/// Binary layout, all integers and floats little-endian:
///   "FGEN1"                      5 bytes magic
///   u8  flags                    bit 0: values are logs
///   u64 seed, n_paths, n_times, record_stride
///   f64 horizon, dt, r0
///   u32 model_ref length, then that many bytes
///   f64 times[n_times]
///   u64 stream_ids[n_paths]
///   f64 values[n_paths * n_times]   row-major by path
void write_ensemble_binary(std::ostream& os, const PathEnsemble& ens);
PathEnsemble read_ensemble_binary(std::istream& is);

}  // namespace flowgrowth::sim
