#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "parisi/error.hpp"
#include "parisi/parisi_pde.hpp"

namespace parisi {

class PDESolutionBuilder {
 public:
  static PDESolution load(std::istream& in);
};

namespace {

constexpr char kMagic[8] = {'P', 'A', 'R', 'I', 'S', 'I', 'P', 'D'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_vec(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::IoError, "truncated PDE dump");
  return v;
}

std::vector<double> get_vec(std::istream& in, std::uint64_t limit) {
  const auto n = get<std::uint64_t>(in);
  if (n > limit) throw Error(ErrorCode::IoError, "corrupt PDE dump length");
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw Error(ErrorCode::IoError, "truncated PDE dump");
  return v;
}

}  // namespace

void write_pde_solution(const PDESolution& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kPdeDumpVersion);
  const auto& g = s.grid();
  put<double>(out, g.x_max);
  put<std::int32_t>(out, g.n_x);
  put<std::int32_t>(out, g.n_u);
  put<std::int32_t>(out, g.quad_order);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.mixture().coeffs().size()));
  for (const auto& [p, c] : s.mixture().coeffs()) {
    put<std::int32_t>(out, p);
    put<double>(out, c);
  }
  put<std::int32_t>(out, s.measure().k());
  put_vec(out, s.measure().m());
  put_vec(out, s.measure().q());
  put_vec(out, s.u_slices());
  for (int j = 0; j < 4; ++j) {
    for (const auto& sl : s.slices()) {
      const auto& v = sl.derivative(j);
      out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

PDESolution PDESolutionBuilder::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::IoError, "not a PDE dump");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kPdeDumpVersion) {
    throw Error(ErrorCode::IoError, "unsupported PDE dump version " + std::to_string(version));
  }
  GridParams g;
  g.x_max = get<double>(in);
  g.n_x = get<std::int32_t>(in);
  g.n_u = get<std::int32_t>(in);
  g.quad_order = get<std::int32_t>(in);
  const auto nc = get<std::uint32_t>(in);
  std::map<int, double> coeffs;
  for (std::uint32_t i = 0; i < nc; ++i) {
    const auto p = get<std::int32_t>(in);
    coeffs[p] = get<double>(in);
  }
  const auto k = get<std::int32_t>(in);
  auto m = get_vec(in, 64);
  auto q = get_vec(in, 64);
  PDESolution sol(Mixture::validate(coeffs), RSBMeasure::make(k, std::move(m), std::move(q)), g);
  sol.build_levels(true);
  sol.u_ = get_vec(in, 1u << 24);
  const auto n = static_cast<std::size_t>(g.n_x);
  sol.slices_.assign(sol.u_.size(), Slice{});
  for (std::size_t i = 0; i < sol.u_.size(); ++i) sol.slices_[i].u = sol.u_[i];
  for (int j = 0; j < 4; ++j) {
    for (auto& sl : sol.slices_) {
      auto& v = j == 0 ? sl.phi : j == 1 ? sl.d1 : j == 2 ? sl.d2 : sl.d3;
      v.resize(n);
      in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
      if (!in) throw Error(ErrorCode::IoError, "truncated PDE dump");
    }
  }
  return sol;
}

PDESolution read_pde_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return PDESolutionBuilder::load(in);
}

}  // namespace parisi
