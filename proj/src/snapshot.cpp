#include "bvx/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "bvx/error.hpp"

namespace bvx {

namespace {

constexpr char kMagic[4] = {'B', 'V', 'X', 'L'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  template <class T>
  void put(T v) {
    v = byteswap_if_big(v);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& b, const std::string& path) : b_(b), path_(path) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > b_.size()) throw Error(ErrorKind::corrupt_file, path_ + ": truncated");
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return byteswap_if_big(v);
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  const std::vector<char>& b_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SnapshotHeader parse_header(Reader& r, const std::vector<char>& bytes, const std::string& path) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorKind::corrupt_file, path + ": bad magic");
  for (int i = 0; i < 4; ++i) r.get<char>();
  SnapshotHeader h;
  h.version = r.get<std::uint32_t>();
  if (h.version != kSnapshotVersion)
    throw Error(ErrorKind::version_mismatch, path + ": format version " + std::to_string(h.version) +
                                                 ", expected " + std::to_string(kSnapshotVersion));
  h.grid.L = r.get<double>();
  h.grid.N = r.get<std::int32_t>();
  h.grid.Nv = r.get<std::int32_t>();
  const auto bc = r.get<std::uint8_t>();
  h.grid.dealias_fraction = r.get<double>();
  h.physics.Omega = r.get<double>();
  h.physics.Gamma = r.get<double>();
  h.physics.nu = r.get<double>();
  h.t = r.get<double>();
  const auto frame = r.get<std::uint8_t>();
  const auto form = r.get<std::uint8_t>();
  h.background.A = r.get<double>();
  h.background.B1 = r.get<double>();
  h.background.B2 = r.get<double>();
  h.background.Gamma = r.get<double>();
  h.entries = r.get<std::uint64_t>();
  if (bc > 1 || frame > 1 || form > 1) throw Error(ErrorKind::corrupt_file, path + ": bad enum in header");
  h.grid.bc = static_cast<Boundary>(bc);
  h.frame = static_cast<FrameTag>(frame);
  h.formulation = static_cast<Formulation>(form);
  try {
    h.grid.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::corrupt_file, path + ": bad grid in header (" + e.what() + ")");
  }
  const std::uint64_t expect = 4ull * h.grid.N * h.grid.N * h.grid.Nv;
  if (h.entries != expect) throw Error(ErrorKind::corrupt_file, path + ": payload length does not match the grid");
  return h;
}

}  // namespace

void save_snapshot(const SimState& s, const std::string& path) {
  const Grid& g = s.v.grid();
  if (s.v.ncomp() != 4 || s.v.layout() != Layout::volume)
    throw Error(ErrorKind::shape_mismatch, "snapshots hold 4-component volume states");
  const GridSpec& gs = g.spec();
  Writer w;
  w.raw(kMagic, 4);
  w.put<std::uint32_t>(kSnapshotVersion);
  w.put<double>(gs.L);
  w.put<std::int32_t>(gs.N);
  w.put<std::int32_t>(gs.Nv);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(gs.bc));
  w.put<double>(gs.dealias_fraction);
  w.put<double>(s.params.Omega);
  w.put<double>(s.params.Gamma);
  w.put<double>(s.params.nu);
  w.put<double>(s.t);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(s.v.frame()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(s.formulation));
  w.put<double>(s.background.A);
  w.put<double>(s.background.B1);
  w.put<double>(s.background.B2);
  w.put<double>(s.background.Gamma);
  const int n = g.n(), nv = g.nv();
  w.put<std::uint64_t>(4ull * n * n * nv);
  for (int c = 0; c < 4; ++c)
    for (int m3 = -nv / 2; m3 < nv / 2; ++m3)
      for (int m2 = -n / 2; m2 < n / 2; ++m2)
        for (int m1 = -n / 2; m1 < n / 2; ++m1) {
          const int iz = (m3 + nv) % nv, j2 = (m2 + n) % n;
          cplx z;
          if (m1 >= 0)
            z = s.v.at(c, iz, j2, m1);
          else if (m1 == -n / 2)
            z = s.v.at(c, iz, j2, n / 2);
          else
            z = std::conj(s.v.at(c, (nv - iz) % nv, (n - j2) % n, -m1));
          w.put<double>(z.real());
          w.put<double>(z.imag());
        }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

SnapshotHeader read_snapshot_header(const std::string& path) {
  const auto bytes = slurp(path);
  Reader r(bytes, path);
  return parse_header(r, bytes, path);
}

SimState load_snapshot(const std::string& path) {
  const auto bytes = slurp(path);
  Reader r(bytes, path);
  const SnapshotHeader h = parse_header(r, bytes, path);
  if (r.remaining() != h.entries * 16) throw Error(ErrorKind::corrupt_file, path + ": payload size mismatch");
  SimState s;
  s.v = SpectralField(make_grid(h.grid), 4);
  s.v.set_frame(h.frame);
  s.t = h.t;
  s.params = h.physics;
  s.formulation = h.formulation;
  s.background = h.background;
  const int n = h.grid.N, nv = h.grid.Nv;
  for (int c = 0; c < 4; ++c)
    for (int m3 = -nv / 2; m3 < nv / 2; ++m3)
      for (int m2 = -n / 2; m2 < n / 2; ++m2)
        for (int m1 = -n / 2; m1 < n / 2; ++m1) {
          const double re = r.get<double>();
          const double im = r.get<double>();
          const int iz = (m3 + nv) % nv, j2 = (m2 + n) % n;
          if (m1 >= 0)
            s.v.at(c, iz, j2, m1) = {re, im};
          else if (m1 == -n / 2)
            s.v.at(c, iz, j2, n / 2) = {re, im};
        }
  return s;
}

}  // namespace bvx
