#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"

#include "byte_io.hpp"
#include "tsdf_dse/dataflow.hpp"
#include "tsdf_dse/error.hpp"

namespace tsdf {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kD16Magic[4] = {'D', '1', '6', '\0'};

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> encode_d16(int width, int height, std::span<const std::uint16_t> depth) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("d16: non-positive raster size");
  if (depth.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("d16: sample count does not match raster size");
  }
  detail::ByteWriter w;
  w.bytes(kD16Magic, 4);
  w.u32(static_cast<std::uint32_t>(width));
  w.u32(static_cast<std::uint32_t>(height));
  for (auto d : depth) w.u16(d);
  return std::move(w.buffer());
}

D16Raster decode_d16(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "d16");
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kD16Magic))) throw FormatError("d16: bad magic");
  const auto w = r.u32();
  const auto h = r.u32();
  if (w == 0 || h == 0 || w > 1u << 15 || h > 1u << 15) throw FormatError("d16: implausible raster size");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (r.remaining() != 2 * n) {
    throw FormatError("d16: expected " + std::to_string(2 * n) + " sample bytes, found " +
                      std::to_string(r.remaining()));
  }
  D16Raster out{static_cast<int>(w), static_cast<int>(h), std::vector<std::uint16_t>(n)};
  for (auto& d : out.depth) d = r.u16();
  return out;
}

D16Raster read_d16(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_d16(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_d16(const fs::path& path, int width, int height, std::span<const std::uint16_t> depth) {
  write_file(path, encode_d16(width, height, depth));
}

void write_intrinsics(const fs::path& path, const Intrinsics& intr) {
  const json j = {{"fx", intr.fx},         {"fy", intr.fy},         {"cx", intr.cx},
                  {"cy", intr.cy},         {"width", intr.width},   {"height", intr.height},
                  {"depth_scale", intr.depth_scale}};
  const std::string text = j.dump(2) + "\n";
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

Intrinsics read_intrinsics(const fs::path& path) {
  const auto bytes = read_file(path);
  const json j = parse_json(std::string(bytes.begin(), bytes.end()), path.string());
  Intrinsics intr;
  try {
    intr.fx = j.at("fx").get<double>();
    intr.fy = j.at("fy").get<double>();
    intr.cx = j.at("cx").get<double>();
    intr.cy = j.at("cy").get<double>();
    intr.width = j.at("width").get<int>();
    intr.height = j.at("height").get<int>();
    intr.depth_scale = j.at("depth_scale").get<double>();
    intr.validate();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return intr;
}

void write_sequence(const fs::path& dir, std::span<const DepthFrame> frames) {
  if (frames.empty()) throw std::invalid_argument("write_sequence: no frames");
  const Intrinsics& intr = frames.front().intr;
  for (const auto& f : frames) {
    f.validate();
    if (!(f.intr == intr)) throw std::invalid_argument("write_sequence: frames disagree on intrinsics");
  }
  std::error_code ec;
  fs::create_directories(dir / "depth", ec);
  if (ec) throw IoError("cannot create " + (dir / "depth").string() + ": " + ec.message());

  write_intrinsics(dir / "intrinsics.json", intr);
  std::ofstream index(dir / "frames.jsonl");
  if (!index) throw IoError("cannot open " + (dir / "frames.jsonl").string() + " for writing");
  for (const auto& f : frames) {
    char name[32];
    std::snprintf(name, sizeof name, "depth/%06d.d16", f.index);
    write_d16(dir / name, intr.width, intr.height, f.depth);
    const auto rm = f.pose.row_major();
    const json line = {{"index", f.index}, {"depth", name}, {"pose", std::vector<double>(rm.begin(), rm.end())}};
    index << line.dump() << '\n';
  }
  if (!index) throw IoError("write failed: " + (dir / "frames.jsonl").string());
}

std::vector<DepthFrame> load_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a sequence directory: " + dir.string());
  const Intrinsics intr = read_intrinsics(dir / "intrinsics.json");
  const fs::path index_path = dir / "frames.jsonl";
  std::ifstream index(index_path);
  if (!index) throw IoError("cannot open " + index_path.string());

  std::vector<DepthFrame> frames;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(index, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = index_path.string() + ":" + std::to_string(lineno);
    const json j = parse_json(line, where);
    DepthFrame f;
    f.intr = intr;
    fs::path depth_rel;
    try {
      f.index = j.at("index").get<int>();
      depth_rel = j.at("depth").get<std::string>();
      const auto pose = j.at("pose").get<std::vector<double>>();
      if (pose.size() != 16) throw FormatError(where + ": pose needs 16 numbers");
      f.pose = Pose::from_row_major(std::span<const double, 16>(pose.data(), 16));
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + ": " + e.what());
    }
    const fs::path depth_path = dir / depth_rel;
    D16Raster raster = read_d16(depth_path);
    if (raster.width != intr.width || raster.height != intr.height) {
      throw FormatError(depth_path.string() + ": raster size does not match intrinsics");
    }
    f.depth = std::move(raster.depth);
    if (!frames.empty() && f.index <= frames.back().index) {
      throw FormatError(where + ": frame indices must increase");
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace tsdf
