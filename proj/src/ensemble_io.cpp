#include "flowgrowth/ensemble_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "flowgrowth/moment_curve.hpp"

namespace flowgrowth::sim {

namespace {

constexpr char kMagic[5] = {'F', 'G', 'E', 'N', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("FGEN1: truncated input");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("FGEN1: truncated input");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens) {
  os << "t,path_id,value\n";
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    for (std::size_t i = 0; i < ens.n_times(); ++i) {
      os << format_double(ens.times[i]) << ',' << ens.stream_ids[p] << ','
         << format_double(ens.at(p, i)) << '\n';
    }
  }
}

void write_ensemble_binary(std::ostream& os, const PathEnsemble& ens) {
  os.write(kMagic, sizeof(kMagic));
  os.put(static_cast<char>(ens.log_domain ? 1 : 0));
  put_u64(os, ens.config.seed);
  put_u64(os, ens.n_paths());
  put_u64(os, ens.n_times());
  put_u64(os, static_cast<std::uint64_t>(ens.config.record_stride));
  put_f64(os, ens.config.horizon);
  put_f64(os, ens.config.dt);
  put_f64(os, ens.config.r0);
  put_u32(os, static_cast<std::uint32_t>(ens.model_ref.size()));
  os.write(ens.model_ref.data(), static_cast<std::streamsize>(ens.model_ref.size()));
  for (double t : ens.times) put_f64(os, t);
  for (auto id : ens.stream_ids) put_u64(os, id);
  for (double v : ens.values) put_f64(os, v);
}

PathEnsemble read_ensemble_binary(std::istream& is) {
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
    throw std::runtime_error("FGEN1: bad magic");
  }
  PathEnsemble ens;
  const int flags = is.get();
  if (flags < 0) throw std::runtime_error("FGEN1: truncated input");
  ens.log_domain = (flags & 1) != 0;
  ens.config.seed = get_u64(is);
  const auto n_paths = get_u64(is);
  const auto n_times = get_u64(is);
  ens.config.record_stride = static_cast<int>(get_u64(is));
  ens.config.horizon = get_f64(is);
  ens.config.dt = get_f64(is);
  ens.config.r0 = get_f64(is);
  ens.config.n_paths = n_paths;
  ens.model_ref.resize(get_u32(is));
  if (!is.read(ens.model_ref.data(), static_cast<std::streamsize>(ens.model_ref.size()))) {
    throw std::runtime_error("FGEN1: truncated input");
  }
  ens.times.resize(n_times);
  for (auto& t : ens.times) t = get_f64(is);
  ens.stream_ids.resize(n_paths);
  for (auto& id : ens.stream_ids) id = get_u64(is);
  ens.values.resize(n_paths * n_times);
  for (auto& v : ens.values) v = get_f64(is);
  return ens;
}

}  // namespace flowgrowth::sim
