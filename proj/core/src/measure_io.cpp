#include "wq/measure_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wq::measures {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

json measure_to_json_obj(const Measure1D& m) {
  json j;
  if (const auto* fm = std::get_if<FiniteMeasure1D>(&m)) {
    j["kind"] = "finite1d";
    j["n"] = fm->grid().n;
    j["p"] = std::vector<double>(fm->p().begin(), fm->p().end());
  } else if (const auto* mm = std::get_if<MixtureMeasure>(&m)) {
    j["kind"] = "mixture";
    j["lambda"] = mm->lambda();
  } else {
    const auto& dm = std::get<DiscreteMeasure1D>(m);
    // not a spec wire format, but round-trips empirical supports
    j["kind"] = "discrete1d";
    j["atoms"] = std::vector<double>(dm.atoms().begin(), dm.atoms().end());
    j["w"] = std::vector<double>(dm.weights().begin(), dm.weights().end());
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace

std::string to_json(const Measure1D& m) {
  return measure_to_json_obj(m).dump();
}

std::string to_json(const FiniteMeasure2D& m) {
  json j;
  j["kind"] = "finite2d";
  j["nx"] = m.grid_x().n;
  j["ny"] = m.grid_y().n;
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(m.grid_x().n));
  for (int i = 0; i < m.grid_x().n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.grid_y().n));
    for (int jcol = 0; jcol < m.grid_y().n; ++jcol) row[jcol] = m.at(i, jcol);
    rows.push_back(std::move(row));
  }
  j["p"] = rows;
  return j.dump();
}

Measure1D measure1d_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad measure JSON: ") + e.what());
  }
  const std::string kind = j.value("kind", "");
  try {
    if (kind == "finite1d") {
      const int n = j.at("n").get<int>();
      auto p = j.at("p").get<std::vector<double>>();
      return FiniteMeasure1D(Grid1D(n), std::move(p));
    }
    if (kind == "mixture") {
      return MixtureMeasure(j.at("lambda").get<double>());
    }
    if (kind == "discrete1d") {
      auto atoms = j.at("atoms").get<std::vector<double>>();
      auto w = j.at("w").get<std::vector<double>>();
      return DiscreteMeasure1D(std::move(atoms), std::move(w));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad measure JSON: ") + e.what());
  }
  throw std::invalid_argument("unknown 1-D measure kind: '" + kind + "'");
}

FiniteMeasure2D measure2d_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad measure JSON: ") + e.what());
  }
  if (j.value("kind", "") != "finite2d")
    throw std::invalid_argument("expected kind 'finite2d'");
  try {
    const int nx = j.at("nx").get<int>();
    const int ny = j.at("ny").get<int>();
    const auto rows = j.at("p").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != nx)
      throw std::invalid_argument("finite2d: row count != nx");
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(nx) * ny);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != ny)
        throw std::invalid_argument("finite2d: row length != ny");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return FiniteMeasure2D(Grid1D(nx), Grid1D(ny), std::move(flat));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad measure JSON: ") + e.what());
  }
}

Measure1D load_measure1d(const std::string& path) {
  return measure1d_from_json(read_file(path));
}

FiniteMeasure2D load_measure2d(const std::string& path) {
  return measure2d_from_json(read_file(path));
}

void save_measure(const Measure1D& m, const std::string& path) {
  write_file(path, to_json(m) + "\n");
}

void save_measure(const FiniteMeasure2D& m, const std::string& path) {
  write_file(path, to_json(m) + "\n");
}

std::string to_csv(const SampleBatch& batch) {
  std::string out = "# seed=" + std::to_string(batch.seed) + "\n";
  for (double x : batch.draws) out += format_double(x) + "\n";
  return out;
}

std::string to_csv(const SampleBatch2D& batch) {
  std::string out = "# seed=" + std::to_string(batch.seed) + "\n";
  for (const auto& xy : batch.draws)
    out += format_double(xy[0]) + "," + format_double(xy[1]) + "\n";
  return out;
}

SampleBatch sample_batch_from_csv(const std::string& text) {
  SampleBatch batch;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos)
        batch.seed = std::stoull(line.substr(pos + 5));
      continue;
    }
    // 1-D batches: take the first column of each row
    std::size_t comma = line.find(',');
    const std::string field =
        comma == std::string::npos ? line : line.substr(0, comma);
    try {
      batch.draws.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad sample CSV row: '" + line + "'");
    }
  }
  if (batch.draws.empty())
    throw std::invalid_argument("sample CSV contains no draws");
  return batch;
}

SampleBatch load_sample_batch(const std::string& path) {
  return sample_batch_from_csv(read_file(path));
}

void save_sample_batch(const SampleBatch& batch, const std::string& path) {
  write_file(path, to_csv(batch));
}

}  // namespace wq::measures
