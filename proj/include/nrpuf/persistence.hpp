#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

#include "nrpuf/config.hpp"
#include "nrpuf/errors.hpp"
#include "nrpuf/puf.hpp"

namespace nrpuf {

// Instance file layout:
//
//   line 1   JSON header: format tag, version, dimensions, seed, device and
//            comparator parameters, body length and CRC-32 of the body.
//   rest     body: for each of arrays a, b, dummy a line "array <name> <rows>
//            <cols>" followed by one line per row of space-separated cells.
//            A cell is "h" (HRS) or "s" (stuck-at-ON) followed by the
//            resistance in ohms as the shortest decimal string that parses
//            back to the same double.

inline constexpr int kInstanceFormatVersion = 1;
inline constexpr std::string_view kInstanceFormatTag = "nrpuf-instance";

namespace detail {

inline std::uint32_t crc32(std::string_view data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_array(std::string& out, std::string_view name, const CrossbarArray& a) {
  out += "array ";
  out += name;
  out += ' ' + std::to_string(a.rows()) + ' ' + std::to_string(a.cols()) + '\n';
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (c) out += ' ';
      out += a(r, c).state == CellState::stuck_on ? 's' : 'h';
      out += format_double(a(r, c).base_resistance);
    }
    out += '\n';
  }
}

inline FormatError malformed(const std::string& what) {
  return FormatError(FormatError::Kind::malformed, "malformed instance file: " + what);
}

class BodyReader {
 public:
  explicit BodyReader(std::string_view body) : body_(body) {}

  std::string_view line() {
    if (pos_ >= body_.size()) throw malformed("unexpected end of body");
    const auto end = body_.find('\n', pos_);
    if (end == std::string_view::npos) throw malformed("unterminated line");
    auto l = body_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return l;
  }
  bool done() const noexcept { return pos_ == body_.size(); }

 private:
  std::string_view body_;
  std::size_t pos_ = 0;
};

inline CrossbarArray read_array(BodyReader& rd, std::string_view name, std::size_t rows,
                                std::size_t cols) {
  const std::string expect =
      "array " + std::string(name) + ' ' + std::to_string(rows) + ' ' + std::to_string(cols);
  if (rd.line() != expect) throw malformed("expected '" + expect + "'");
  std::vector<ReRAMCell> cells;
  cells.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string_view l = rd.line();
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) {
        if (l.empty() || l.front() != ' ') throw malformed("missing cell separator");
        l.remove_prefix(1);
      }
      if (l.empty()) throw malformed("short row");
      ReRAMCell cell;
      if (l.front() == 'h') cell.state = CellState::hrs;
      else if (l.front() == 's') cell.state = CellState::stuck_on;
      else throw malformed("bad cell state tag");
      l.remove_prefix(1);
      const auto res = std::from_chars(l.data(), l.data() + l.size(), cell.base_resistance);
      if (res.ec != std::errc{}) throw malformed("bad resistance value");
      l.remove_prefix(static_cast<std::size_t>(res.ptr - l.data()));
      cells.push_back(cell);
    }
    if (!l.empty()) throw malformed("trailing data in row");
  }
  try {
    return CrossbarArray(rows, cols, std::move(cells));
  } catch (const ConfigError& e) {
    throw malformed(e.what());
  }
}

inline Json comparator_to_json(const ComparatorParams& c) {
  return Json{{"offset_sigma_a", c.offset_sigma},
              {"sense_margin_a", c.sense_margin},
              {"offset_value_a", c.offset_value}};
}

inline ComparatorParams comparator_from_json(const Json& j, const std::string& path) {
  ComparatorParams c;
  ObjectReader r(j, path);
  r.number("offset_sigma_a", c.offset_sigma);
  r.number("sense_margin_a", c.sense_margin);
  r.number("offset_value_a", c.offset_value);
  return c;
}

}  // namespace detail

inline std::string serialize_instance(const PufInstance& puf) {
  std::string body;
  detail::write_array(body, "a", puf.cba_a);
  detail::write_array(body, "b", puf.cba_b);
  detail::write_array(body, "dummy", puf.dummy);
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", static_cast<unsigned>(detail::crc32(body)));
  const Json header{
      {"format", kInstanceFormatTag},
      {"version", kInstanceFormatVersion},
      {"rows", puf.rows()},
      {"cols", puf.cols()},
      {"dummy_rows", puf.dummy.rows()},
      {"dummy_cols", puf.dummy.cols()},
      {"cs", puf.cs},
      {"hidden_width", puf.hidden_width},
      {"instance_seed", puf.instance_seed},
      {"device", device_to_json(puf.device)},
      {"comparator_a", detail::comparator_to_json(puf.comp_a)},
      {"comparator_b", detail::comparator_to_json(puf.comp_b)},
      {"power", power_to_json(puf.power)},
      {"body_bytes", body.size()},
      {"body_crc32", crc},
  };
  return header.dump() + '\n' + body;
}

inline PufInstance deserialize_instance(std::string_view text) {
  const auto nl = text.find('\n');
  if (nl == std::string_view::npos) throw detail::malformed("missing header line");
  Json header;
  try {
    header = Json::parse(text.substr(0, nl));
  } catch (const Json::exception& e) {
    throw detail::malformed(std::string("header: ") + e.what());
  }
  const std::string_view body = text.substr(nl + 1);
  try {
    if (!header.is_object() || header.value("format", std::string{}) != kInstanceFormatTag)
      throw detail::malformed("not an instance file");
    const auto version = header.at("version").get<int>();
    if (version != kInstanceFormatVersion)
      throw FormatError(FormatError::Kind::version_mismatch,
                        "instance file version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kInstanceFormatVersion) + ")");
    const auto expected_bytes = header.at("body_bytes").get<std::size_t>();
    const auto expected_crc = header.at("body_crc32").get<std::string>();
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", static_cast<unsigned>(detail::crc32(body)));
    if (body.size() != expected_bytes || expected_crc != crc)
      throw FormatError(FormatError::Kind::checksum_mismatch,
                        "instance body checksum mismatch (file truncated or modified)");

    const auto rows = header.at("rows").get<std::size_t>();
    const auto cols = header.at("cols").get<std::size_t>();
    const auto drows = header.at("dummy_rows").get<std::size_t>();
    const auto dcols = header.at("dummy_cols").get<std::size_t>();
    detail::BodyReader rd(body);
    PufInstance puf;
    puf.cba_a = detail::read_array(rd, "a", rows, cols);
    puf.cba_b = detail::read_array(rd, "b", rows, cols);
    puf.dummy = detail::read_array(rd, "dummy", drows, dcols);
    if (!rd.done()) throw detail::malformed("trailing data after arrays");
    puf.cs = header.at("cs").get<std::size_t>();
    puf.hidden_width = header.at("hidden_width").get<std::size_t>();
    puf.instance_seed = header.at("instance_seed").get<std::uint64_t>();
    puf.device = device_from_json(header.at("device"));
    puf.comp_a = detail::comparator_from_json(header.at("comparator_a"), "comparator_a");
    puf.comp_b = detail::comparator_from_json(header.at("comparator_b"), "comparator_b");
    puf.power = power_from_json(header.at("power"));
    puf.validate();
    return puf;
  } catch (const Json::exception& e) {
    throw detail::malformed(std::string("header: ") + e.what());
  } catch (const ConfigError& e) {
    throw detail::malformed(e.what());
  }
}

inline void save_instance(const PufInstance& puf, const std::string& path) {
  const std::string text = serialize_instance(puf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::io, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError(FormatError::Kind::io, "write failed for '" + path + "'");
}

inline PufInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_instance(ss.str());
}

}  // namespace nrpuf
