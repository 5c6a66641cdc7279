#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kplane/errors.hpp"
#include "kplane/fields.hpp"

namespace kplane {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'K', 'P', 'T', '1'};
constexpr std::size_t kPreamble = 8;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

void append_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void append_payload(std::string& out, const std::vector<double>& values) {
  const std::size_t start = out.size();
  out.resize(start + 8 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(out.data() + start + 8 * i, &bits, 8);
  }
}

json grid_header(const GridSpec& g) {
  return json{{"origin", g.origin}, {"spacing", g.spacing}, {"shape", g.shape}};
}

GridSpec parse_grid(const json& h) {
  GridSpec g;
  g.origin = h.at("origin").get<std::vector<double>>();
  g.spacing = h.at("spacing").get<double>();
  g.shape = h.at("shape").get<std::vector<int>>();
  g.validate();
  return g;
}

}  // namespace

std::string encode_kpt(const KptObject& object) {
  json header;
  const std::vector<double>* values = nullptr;
  if (const auto* field = std::get_if<GridField>(&object)) {
    header = grid_header(field->grid);
    header["kind"] = "grid";
    header["d"] = field->dim();
    values = &field->values;
  } else {
    const auto& sino = std::get<Sinogram>(object);
    sino.validate();
    header = grid_header(sino.t_grid);
    header["kind"] = "sinogram";
    header["d"] = sino.d;
    header["k"] = sino.k;
    json frames = json::array();
    for (const auto& f : sino.frames) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < f.rows().rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(f.rows().cols()));
        for (Eigen::Index c = 0; c < f.rows().cols(); ++c) row[static_cast<std::size_t>(c)] = f.rows()(r, c);
        rows.push_back(row);
      }
      frames.push_back(rows);
    }
    header["frames"] = frames;
    values = &sino.values;
  }
  const std::string text = header.dump();
  std::string out(kMagic, 4);
  append_u32_le(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  append_payload(out, *values);
  return out;
}

KptObject decode_kpt(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected KPT1", 0);
  if (bytes.size() < kPreamble) throw FormatError("truncated header length", 4);
  std::uint32_t hlen = 0;
  for (int i = 0; i < 4; ++i) hlen |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + i])) << (8 * i);
  if (bytes.size() < kPreamble + hlen) throw FormatError("header length exceeds file size", 4);

  json header;
  try {
    header = json::parse(bytes.substr(kPreamble, hlen));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON header: ") + e.what(), kPreamble + (e.byte > 0 ? e.byte - 1 : 0));
  }

  const std::size_t payload_at = kPreamble + hlen;
  auto read_payload = [&](std::size_t count) {
    const std::size_t available = bytes.size() - payload_at;
    if (available != 8 * count) {
      throw FormatError("payload has " + std::to_string(available) + " bytes, header implies " +
                            std::to_string(8 * count),
                        payload_at + std::min(available, 8 * count));
    }
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, bytes.data() + payload_at + 8 * i, 8);
      v[i] = std::bit_cast<double>(to_le(bits));
    }
    return v;
  };

  try {
    const std::string kind = header.at("kind").get<std::string>();
    const int d = header.at("d").get<int>();
    GridSpec grid = parse_grid(header);
    if (kind == "grid") {
      if (grid.dim() != d) throw FormatError("grid header: shape length differs from d", kPreamble);
      auto values = read_payload(grid.size());
      return GridField(std::move(grid), std::move(values));
    }
    if (kind == "sinogram") {
      const int k = header.at("k").get<int>();
      std::vector<Frame> frames;
      for (const auto& rows : header.at("frames")) {
        Eigen::MatrixXd a(d - k, d);
        if (static_cast<int>(rows.size()) != d - k) throw FormatError("sinogram header: frame has wrong row count", kPreamble);
        for (int r = 0; r < d - k; ++r) {
          const auto row = rows.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
          if (static_cast<int>(row.size()) != d) throw FormatError("sinogram header: frame row has wrong length", kPreamble);
          for (int c = 0; c < d; ++c) a(r, c) = row[static_cast<std::size_t>(c)];
        }
        frames.emplace_back(d, k, std::move(a));
      }
      Sinogram sino(d, k, std::move(frames), std::move(grid));
      sino.values = read_payload(sino.values.size());
      return sino;
    }
    throw FormatError("unknown kind '" + kind + "'", kPreamble);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid header: ") + e.what(), kPreamble);
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid header: ") + e.what(), kPreamble);
  }
}

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_kpt(const std::filesystem::path& path, const GridField& field) { write_bytes(path, encode_kpt(field)); }

void write_kpt(const std::filesystem::path& path, const Sinogram& sino) { write_bytes(path, encode_kpt(sino)); }

KptObject read_kpt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_kpt(bytes);
}

}  // namespace kplane
