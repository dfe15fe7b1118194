#include "gsqg/snapshot.hpp"

#include <array>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsqg/errors.hpp"

namespace gsqg {
namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw FormatError("snapshot: truncated binary file");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

template <class Fn>
void for_each_positive_mode(int m, Fn&& fn) {
  const int h = m / 2;
  for (int n1 = 0; n1 < h; ++n1) {
    for (int n2 = (n1 == 0 ? 1 : -h + 1); n2 < h; ++n2) fn(Wavenumber{n1, n2});
  }
}

std::size_t positive_mode_count(int m) {
  const std::size_t h = static_cast<std::size_t>(m / 2);
  return (h - 1) + (h - 1) * (2 * h - 1);
}

SpectralField assemble(int m, const std::vector<Mode>& modes) {
  SpectralField f(m);
  auto data = f.mutable_half_spectrum();
  for (const Mode& md : modes) {
    if (!f.representable(md.n)) throw FormatError("snapshot: record outside grid truncation");
    Wavenumber n = md.n;
    Complex a = md.amplitude;
    if (n.n2 < 0) {
      n = {-n.n1, -n.n2};
      a = std::conj(a);
    }
    const int row = n.n1 >= 0 ? n.n1 : n.n1 + m;
    data[f.index(row, n.n2)] = a;
    if (n.n2 == 0) {
      const int prow = n.n1 > 0 ? m - n.n1 : -n.n1;
      data[f.index(prow, 0)] = std::conj(a);
    }
  }
  f.enforce_invariants();
  return f;
}

void check_header(const SnapshotHeader& h, const SpectralField& f) {
  if (h.grid_size != f.grid_size()) throw std::invalid_argument("snapshot: header grid size does not match field");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_snapshot_binary(std::ostream& out, const SnapshotHeader& header, const SpectralField& field) {
  check_header(header, field);
  put_le<std::int32_t>(out, header.grid_size);
  put_le<double>(out, header.alpha);
  put_le<double>(out, header.gamma);
  put_le<double>(out, header.nu);
  put_le<double>(out, header.t);
  put_le<std::int32_t>(out, static_cast<std::int32_t>(positive_mode_count(header.grid_size)));
  for_each_positive_mode(header.grid_size, [&](Wavenumber n) {
    const Complex c = field.coeff(n);
    put_le<std::int32_t>(out, n.n1);
    put_le<std::int32_t>(out, n.n2);
    put_le<double>(out, c.real());
    put_le<double>(out, c.imag());
  });
}

void write_snapshot_csv(std::ostream& out, const SnapshotHeader& header, const SpectralField& field) {
  check_header(header, field);
  out << "M,alpha,gamma,nu,t\n"
      << header.grid_size << ',' << format_double(header.alpha) << ',' << format_double(header.gamma) << ','
      << format_double(header.nu) << ',' << format_double(header.t) << '\n'
      << "n1,n2,re,im\n";
  for_each_positive_mode(header.grid_size, [&](Wavenumber n) {
    const Complex c = field.coeff(n);
    out << n.n1 << ',' << n.n2 << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
  });
}

Snapshot read_snapshot_binary(std::istream& in) {
  Snapshot s;
  s.header.grid_size = get_le<std::int32_t>(in);
  s.header.alpha = get_le<double>(in);
  s.header.gamma = get_le<double>(in);
  s.header.nu = get_le<double>(in);
  s.header.t = get_le<double>(in);
  const int m = s.header.grid_size;
  if (m <= 0 || m % 2 != 0) throw FormatError("snapshot: invalid grid size in header");
  const auto count = get_le<std::int32_t>(in);
  if (count < 0) throw FormatError("snapshot: negative record count");
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(count));
  for (std::int32_t i = 0; i < count; ++i) {
    Mode md;
    md.n.n1 = get_le<std::int32_t>(in);
    md.n.n2 = get_le<std::int32_t>(in);
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    md.amplitude = {re, im};
    modes.push_back(md);
  }
  s.field = assemble(m, modes);
  return s;
}

Snapshot read_snapshot_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("M,alpha,gamma,nu,t", 0) != 0) throw FormatError("snapshot csv: bad header");
  if (!std::getline(in, line)) throw FormatError("snapshot csv: missing header values");
  Snapshot s;
  {
    std::istringstream hs(line);
    char sep = 0;
    if (!(hs >> s.header.grid_size >> sep >> s.header.alpha >> sep >> s.header.gamma >> sep >> s.header.nu >> sep >>
          s.header.t)) {
      throw FormatError("snapshot csv: unparsable header values");
    }
  }
  const int m = s.header.grid_size;
  if (m <= 0 || m % 2 != 0) throw FormatError("snapshot csv: invalid grid size");
  if (!std::getline(in, line) || line.rfind("n1,n2,re,im", 0) != 0) throw FormatError("snapshot csv: bad record header");
  std::vector<Mode> modes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Mode md;
    double re = 0.0;
    double im = 0.0;
    char sep = 0;
    if (!(ls >> md.n.n1 >> sep >> md.n.n2 >> sep >> re >> sep >> im)) throw FormatError("snapshot csv: bad record: " + line);
    md.amplitude = {re, im};
    modes.push_back(md);
  }
  s.field = assemble(m, modes);
  return s;
}

void write_snapshot_binary(const std::filesystem::path& path, const SnapshotHeader& header, const SpectralField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot_binary(out, header, field);
}

void write_snapshot_csv(const std::filesystem::path& path, const SnapshotHeader& header, const SpectralField& field) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot_csv(out, header, field);
}

Snapshot read_snapshot_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot_binary(in);
}

Snapshot read_snapshot_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot_csv(in);
}

}  // namespace gsqg
