#include "minkembed/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "minkembed/error.hpp"

namespace minkembed {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Encoding e) { return e == Encoding::Csv ? "csv" : "raw"; }

Encoding parse_encoding(const std::string& s) {
  if (s == "csv") return Encoding::Csv;
  if (s == "raw") return Encoding::Raw;
  throw Error(ErrorCode::FormatError, "unknown encoding '" + s + "' (expected csv or raw)");
}

json Manifest::to_json() const {
  json axes = json::array();
  for (const auto& a : chart.axes()) axes.push_back({{"min", a.min}, {"max", a.max}, {"samples", a.samples}});
  json fj = json::object();
  for (const auto& [name, e] : fields)
    fj[name] = {{"shape", e.shape}, {"path", e.path}, {"encoding", to_string(e.encoding)}};
  return {{"format", format}, {"dim", chart.dim()}, {"axes", axes}, {"fields", fj}, {"metadata", metadata}};
}

Manifest Manifest::from_json(const json& j) {
  try {
    Manifest m;
    m.format = j.at("format").get<int>();
    if (m.format != 1) throw Error(ErrorCode::FormatError, "unsupported manifest format " + std::to_string(m.format));
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes"))
      axes.push_back(Axis{a.at("min").get<double>(), a.at("max").get<double>(), a.at("samples").get<std::size_t>()});
    if (j.at("dim").get<std::size_t>() != axes.size())
      throw Error(ErrorCode::FormatError, "manifest dim does not match the number of axes");
    try {
      m.chart = GridChart(std::move(axes));
    } catch (const Error& e) {
      throw Error(ErrorCode::FormatError, std::string("bad axes: ") + e.what());
    }
    for (const auto& [name, e] : j.at("fields").items())
      m.fields[name] = FieldEntry{e.at("shape").get<std::vector<std::size_t>>(), e.at("path").get<std::string>(),
                                  parse_encoding(e.value("encoding", "csv"))};
    if (j.contains("metadata")) m.metadata = j.at("metadata");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed manifest: ") + e.what());
  }
}

void write_field(const TensorField& f, const fs::path& path, Encoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  const std::size_t comps = f.components();
  if (encoding == Encoding::Raw) {
    static_assert(std::endian::native == std::endian::little, "raw encoding assumes a little-endian host");
    out.write(reinterpret_cast<const char*>(f.data().data()),
              static_cast<std::streamsize>(f.data().size() * sizeof(double)));
  } else {
    char buf[32];
    for (std::size_t pt = 0; pt < f.points(); ++pt) {
      std::string line;
      for (std::size_t c = 0; c < comps; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", f(pt, c));
        if (c) line += ',';
        line += buf;
      }
      line += '\n';
      out << line;
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

TensorField read_field(const fs::path& path, const GridChart& chart, std::vector<std::size_t> shape,
                       Encoding encoding) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::size_t comps = 1;
  for (auto s : shape) comps *= s;
  const std::size_t count = comps * chart.points();
  std::vector<double> data(count);
  if (encoding == Encoding::Raw) {
    std::error_code ec;
    const auto bytes = fs::file_size(path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot stat " + path.string());
    if (bytes != count * sizeof(double)) {
      std::ostringstream msg;
      msg << path.string() << " has " << bytes << " bytes, expected " << count * sizeof(double);
      throw Error(ErrorCode::FormatError, msg.str());
    }
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw Error(ErrorCode::IoError, "failed reading " + path.string());
  } else {
    std::string line;
    std::size_t pt = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      if (pt == chart.points()) throw Error(ErrorCode::FormatError, path.string() + " has more rows than grid points");
      const char* p = line.c_str();
      for (std::size_t c = 0; c < comps; ++c) {
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) {
          std::ostringstream msg;
          msg << path.string() << ": row " << pt + 1 << " has fewer than " << comps << " numbers";
          throw Error(ErrorCode::FormatError, msg.str());
        }
        data[pt * comps + c] = v;
        p = end;
        while (*p == ' ' || *p == '\t') ++p;
        if (c + 1 < comps) {
          if (*p != ',') throw Error(ErrorCode::FormatError, path.string() + ": expected ',' in row " + std::to_string(pt + 1));
          ++p;
        }
      }
      while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
      if (*p != '\0') throw Error(ErrorCode::FormatError, path.string() + ": trailing data in row " + std::to_string(pt + 1));
      ++pt;
    }
    if (pt != chart.points()) {
      std::ostringstream msg;
      msg << path.string() << " has " << pt << " rows, expected " << chart.points();
      throw Error(ErrorCode::FormatError, msg.str());
    }
  }
  for (double v : data)
    if (!std::isfinite(v)) throw Error(ErrorCode::FormatError, path.string() + " contains a non-finite value");
  return TensorField(chart, std::move(shape), std::move(data));
}

Manifest write_dataset(const fs::path& dir, const std::map<std::string, TensorField>& fields, Encoding encoding,
                       const json& metadata) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  Manifest m;
  m.metadata = metadata;
  bool first = true;
  for (const auto& [name, f] : fields) {
    if (first) {
      m.chart = f.chart();
      first = false;
    } else if (!(f.chart() == m.chart)) {
      throw Error(ErrorCode::ChartMismatch, "dataset fields must share one chart");
    }
    const std::string file = name + (encoding == Encoding::Csv ? ".csv" : ".bin");
    write_field(f, dir / file, encoding);
    m.fields[name] = FieldEntry{f.shape(), file, encoding};
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "manifest.json").string());
  out << m.to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing the manifest");
  return m;
}

const TensorField& Dataset::field(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) throw Error(ErrorCode::InvalidInput, "dataset has no field '" + name + "'");
  return it->second;
}

Dataset read_dataset(const fs::path& manifest) {
  const fs::path file = fs::is_directory(manifest) ? manifest / "manifest.json" : manifest;
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, file.string() + ": " + e.what());
  }
  Dataset ds{Manifest::from_json(j), {}};
  for (const auto& [name, e] : ds.manifest.fields) {
    try {
      ds.fields.emplace(name, read_field(file.parent_path() / e.path, ds.manifest.chart, e.shape, e.encoding));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ShapeMismatch && err.code() != ErrorCode::InvalidInput) throw;
      throw Error(ErrorCode::FormatError, name + ": " + err.what());
    }
  }
  return ds;
}

}  // namespace minkembed
