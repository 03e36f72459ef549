#include "taxai/bmfac/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "taxai/errors.hpp"

namespace taxai::bmfac {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'X', 'C', 'K'};

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t k = 0; k < sizeof(U); ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("checkpoint: unexpected end of file");
  U v = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) v |= static_cast<U>(bytes[k]) << (8 * k);
  return v;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_checkpoint(std::ostream& out, const std::vector<NamedNetwork>& networks) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(networks.size()));
  for (const auto& [name, net] : networks) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(net.activation()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.dims().size()));
    for (int d : net.dims()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (std::size_t k = 0; k < net.layer_count(); ++k) {
      const auto w = net.weight(k);
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
      }
      const auto b = net.bias(k);
      for (Eigen::Index r = 0; r < b.size(); ++r) put_f64(out, b[r]);
    }
  }
  if (!out) throw Error("checkpoint: write failed");
}

std::vector<NamedNetwork> read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("checkpoint: bad magic bytes");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto count = get_le<std::uint32_t>(in);
  std::vector<NamedNetwork> out;
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto len = get_le<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto act = get_le<std::uint8_t>(in);
    if (act > 1) throw ConfigError("checkpoint: unknown activation code");
    const auto dim_count = get_le<std::uint32_t>(in);
    if (dim_count < 2 || dim_count > 64) throw ConfigError("checkpoint: implausible layer count");
    std::vector<int> dims(dim_count);
    for (auto& d : dims) {
      d = static_cast<int>(get_le<std::uint32_t>(in));
      if (d < 1 || d > (1 << 20)) throw ConfigError("checkpoint: implausible layer width");
    }
    Mlp net(dims, static_cast<Activation>(act), 0);
    Eigen::VectorXd& p = net.parameters();
    std::size_t offset = 0;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
      const auto rows = static_cast<std::size_t>(dims[k + 1]);
      const auto cols = static_cast<std::size_t>(dims[k]);
      // file is row-major, storage column-major
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          p[static_cast<Eigen::Index>(offset + c * rows + r)] = get_f64(in);
        }
      }
      offset += rows * cols;
      for (std::size_t r = 0; r < rows; ++r) p[static_cast<Eigen::Index>(offset + r)] = get_f64(in);
      offset += rows;
    }
    out.emplace_back(std::move(name), std::move(net));
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedNetwork>& networks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint: cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, networks);
}

std::vector<NamedNetwork> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace taxai::bmfac
