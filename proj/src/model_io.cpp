#include "hops/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hops/error.hpp"

namespace hops {
namespace {

constexpr char kMagic[8] = {'H', 'O', 'P', 'S', 'M', 'D', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_doubles(std::ostream& os, std::span<const double> v) {
  put_u64(os, v.size());
  for (double d : v) put_f64(os, d);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw DataError("model_io.truncated", "model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

std::string get_string(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  if (n > (1u << 20)) throw DataError("model_io.corrupt", "unreasonable string length");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw DataError("model_io.truncated", "model file truncated");
  return s;
}

std::vector<double> get_doubles(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  std::vector<double> v(n);
  for (auto& d : v) d = get_f64(is);
  return v;
}

void put_normalizer(std::ostream& os, const MinMaxNormalizer& nz) {
  put_doubles(os, nz.col_min);
  put_doubles(os, nz.col_max);
}

MinMaxNormalizer get_normalizer(std::istream& is) {
  MinMaxNormalizer nz;
  nz.col_min = get_doubles(is);
  nz.col_max = get_doubles(is);
  if (nz.col_min.size() != nz.col_max.size()) {
    throw DataError("model_io.corrupt", "normalizer bounds of different widths");
  }
  return nz;
}

void put_reduction(std::ostream& os, const ReductionMap& map) {
  put_u64(os, map.source_dims);
  put_u64(os, map.target_dim);
  put_u64(os, map.fitted_on.hash);
  put_u64(os, map.fitted_on.rows);
  put_doubles(os, map.embed.storage());
}

ReductionMap get_reduction(std::istream& is) {
  ReductionMap map;
  map.source_dims = get_u64(is);
  map.target_dim = get_u64(is);
  map.fitted_on.hash = get_u64(is);
  map.fitted_on.rows = get_u64(is);
  std::vector<double> data = get_doubles(is);
  if (map.source_dims * map.target_dim != data.size()) {
    throw DataError("model_io.corrupt", "reduction map size mismatch");
  }
  map.embed = Matrix(map.source_dims, map.target_dim, std::move(data));
  return map;
}

}  // namespace

void save_model(const SavedModel& saved, std::ostream& os) {
  os.write(kMagic, sizeof(kMagic));
  put_u64(os, saved.is_poly() ? 0 : 1);
  put_string(os, saved.variables);
  put_u64(os, saved.recency_h);
  put_u64(os, saved.recency_d);

  if (saved.is_poly()) {
    const PolyModel& m = std::get<PolyModel>(saved.model);
    put_u64(os, m.spec.input_dim);
    put_u64(os, m.spec.max_order);
    put_u64(os, m.spec.trend_column ? *m.spec.trend_column + 1 : 0);
    put_u64(os, m.spec.embed_dims.size());
    for (std::size_t k : m.spec.embed_dims) put_u64(os, k);
    put_doubles(os, m.spec.lambda);
    put_f64(os, m.bias);
    put_u64(os, m.tensors.size());
    for (const auto& t : m.tensors) put_doubles(os, t);
    put_u64(os, m.reductions.size());
    for (const auto& r : m.reductions) put_reduction(os, r);
    put_normalizer(os, m.normalizer);
  } else {
    const LinearModel& m = std::get<LinearModel>(saved.model);
    put_doubles(os, m.coefficients);
    put_normalizer(os, m.normalizer);
  }
  if (!os) throw DataError("model_io.write", "failed while writing model");
}

void save_model(const SavedModel& saved, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("model_io.open", "cannot open " + path.string() + " for write");
  save_model(saved, os);
}

SavedModel load_model(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("model_io.magic", "not a model file");
  }
  SavedModel saved;
  const std::uint64_t kind = get_u64(is);
  saved.variables = get_string(is);
  saved.recency_h = get_u64(is);
  saved.recency_d = get_u64(is);

  if (kind == 0) {
    PolyModel m;
    m.spec.input_dim = get_u64(is);
    m.spec.max_order = get_u64(is);
    const std::uint64_t trend = get_u64(is);
    if (trend > 0) m.spec.trend_column = trend - 1;
    const std::uint64_t nk = get_u64(is);
    for (std::uint64_t i = 0; i < nk; ++i) m.spec.embed_dims.push_back(get_u64(is));
    m.spec.lambda = get_doubles(is);
    m.bias = get_f64(is);
    const std::uint64_t nt = get_u64(is);
    for (std::uint64_t i = 0; i < nt; ++i) m.tensors.push_back(get_doubles(is));
    const std::uint64_t nr = get_u64(is);
    for (std::uint64_t i = 0; i < nr; ++i) m.reductions.push_back(get_reduction(is));
    m.normalizer = get_normalizer(is);
    m.spec.validate();
    saved.model = std::move(m);
  } else if (kind == 1) {
    LinearModel m;
    m.spec = saved.variable_spec();
    m.coefficients = get_doubles(is);
    m.normalizer = get_normalizer(is);
    saved.model = std::move(m);
  } else {
    throw DataError("model_io.kind", "unknown model kind");
  }
  return saved;
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("model_io.open", "cannot open " + path.string());
  return load_model(is);
}

}  // namespace hops
