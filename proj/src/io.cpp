#include "ttfit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ttfit {

namespace {

using nlohmann::json;

std::string format_value(double y) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", y);
  return buf;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + what + ": " + e.what());
  }
}

}  // namespace

json tt_to_json(const TtTensor& t) {
  json cores = json::array();
  for (int k = 0; k < t.order(); ++k) {
    const TtCore& c = t.core(k);
    json core = json::array();
    for (int a = 0; a < c.r_left; ++a) {
      json plane = json::array();
      for (int j = 0; j < c.n; ++j) {
        json row = json::array();
        for (int b = 0; b < c.r_right; ++b) row.push_back(c.at(a, j, b));
        plane.push_back(std::move(row));
      }
      core.push_back(std::move(plane));
    }
    cores.push_back(std::move(core));
  }
  return json{{"dims", t.dims()}, {"ranks", t.ranks()}, {"cores", cores}};
}

TtTensor tt_from_json(const json& j) {
  try {
    const std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    const std::vector<int> ranks = j.at("ranks").get<std::vector<int>>();
    const json& cores = j.at("cores");
    if (dims.empty() || ranks.size() != dims.size() + 1 ||
        cores.size() != dims.size())
      throw std::runtime_error("inconsistent dims, ranks and cores");
    std::vector<TtCore> chain;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      TtCore c(ranks[k], dims[k], ranks[k + 1]);
      const json& core = cores.at(k);
      if (static_cast<int>(core.size()) != c.r_left)
        throw std::runtime_error("core " + std::to_string(k) +
                                 " has the wrong left rank");
      for (int a = 0; a < c.r_left; ++a) {
        const json& plane = core.at(a);
        if (static_cast<int>(plane.size()) != c.n)
          throw std::runtime_error("core " + std::to_string(k) +
                                   " has the wrong mode size");
        for (int jj = 0; jj < c.n; ++jj) {
          const json& row = plane.at(jj);
          if (static_cast<int>(row.size()) != c.r_right)
            throw std::runtime_error("core " + std::to_string(k) +
                                     " has the wrong right rank");
          for (int b = 0; b < c.r_right; ++b)
            c.at(a, jj, b) = row.at(b).get<double>();
        }
      }
      chain.push_back(std::move(c));
    }
    return TtTensor(std::move(chain));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid tensor description: ") +
                             e.what());
  }
}

json anova_to_json(const AnovaModel& m) {
  return json{{"dims", m.dims},
              {"f0", m.f0},
              {"terms", m.terms},
              {"counts", m.counts}};
}

AnovaModel anova_from_json(const json& j) {
  try {
    AnovaModel m;
    m.dims = j.at("dims").get<std::vector<int>>();
    m.f0 = j.at("f0").get<double>();
    m.terms = j.at("terms").get<std::vector<std::vector<double>>>();
    m.counts = j.at("counts").get<std::vector<std::vector<int>>>();
    if (m.terms.size() != m.dims.size() || m.counts.size() != m.dims.size())
      throw std::runtime_error("inconsistent model shape");
    for (std::size_t i = 0; i < m.dims.size(); ++i)
      if (static_cast<int>(m.terms[i].size()) != m.dims[i] ||
          static_cast<int>(m.counts[i].size()) != m.dims[i])
        throw std::runtime_error("inconsistent model shape in mode " +
                                 std::to_string(i));
    return m;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid model description: ") +
                             e.what());
  }
}

void save_model(const TtTensor& t, const std::string& path) {
  write_text_file(path, tt_to_json(t).dump(2) + "\n");
}

TtTensor load_model(const std::string& path) {
  return tt_from_json(parse_json(read_text_file(path), path));
}

void save_dataset(const Dataset& data, const std::vector<int>& dims,
                  const std::string& path) {
  if (data.idxs.size() != data.ys.size())
    throw std::invalid_argument("dataset indices and values differ in length");
  const std::size_t d = dims.size();
  std::ostringstream out;
  for (std::size_t i = 0; i < d; ++i) out << "i_" << (i + 1) << ",";
  out << "y\n";
  for (std::size_t s = 0; s < data.idxs.size(); ++s) {
    if (data.idxs[s].size() != d)
      throw std::invalid_argument("sample " + std::to_string(s) +
                                  " has the wrong index length");
    for (std::size_t i = 0; i < d; ++i) out << (data.idxs[s][i] + 1) << ",";
    out << format_value(data.ys[s]) << "\n";
  }
  write_text_file(path, out.str());

  const json meta{{"dims", dims},
                  {"count", data.idxs.size()},
                  {"noise_sigma", data.noise_sigma},
                  {"hash", dataset_hash(data)}};
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

std::pair<Dataset, std::vector<int>> load_dataset(const std::string& path) {
  const json meta = parse_json(read_text_file(path + ".meta.json"),
                               path + ".meta.json");
  std::vector<int> dims;
  Dataset data;
  std::size_t count = 0;
  try {
    dims = meta.at("dims").get<std::vector<int>>();
    count = meta.at("count").get<std::size_t>();
    data.noise_sigma = meta.at("noise_sigma").get<double>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid dataset metadata: ") +
                             e.what());
  }

  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": missing header line");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::istringstream cells(line);
    std::string cell;
    const std::string where = path + " line " + std::to_string(row + 1);
    MultiIndex idx(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!std::getline(cells, cell, ','))
        throw std::runtime_error(where + ": too few columns");
      int one_based = 0;
      try {
        std::size_t used = 0;
        one_based = std::stoi(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(where + ": bad index '" + cell + "'");
      }
      if (one_based < 1 || one_based > dims[i])
        throw std::runtime_error(where + ": index " + cell +
                                 " outside mode " + std::to_string(i + 1));
      idx[i] = one_based - 1;
    }
    if (!std::getline(cells, cell))
      throw std::runtime_error(where + ": missing value column");
    double y = 0.0;
    try {
      std::size_t used = 0;
      y = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": bad value '" + cell + "'");
    }
    data.idxs.push_back(std::move(idx));
    data.ys.push_back(y);
  }
  if (data.idxs.size() != count)
    throw std::runtime_error(path + ": row count " +
                             std::to_string(data.idxs.size()) +
                             " does not match metadata count " +
                             std::to_string(count));
  return {std::move(data), std::move(dims)};
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::uint64_t h = fnv1a(&data.noise_sigma, sizeof(data.noise_sigma));
  for (std::size_t s = 0; s < data.idxs.size(); ++s) {
    for (int i : data.idxs[s]) {
      const std::int64_t v = i;
      h = fnv1a(&v, sizeof(v), h);
    }
    h = fnv1a(&data.ys[s], sizeof(double), h);
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace ttfit
