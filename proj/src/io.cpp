#include "lart/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace lart {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void row_error(int line_no, const std::string& why) {
  throw std::runtime_error("load_dataset: line " + std::to_string(line_no) +
                           ": " + why);
}

}  // namespace

ResponseDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_dataset: empty file " + path);
  {
    std::string header = line;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "subject_id,item_id,correct,cot_length")
      throw std::runtime_error(
          "load_dataset: bad header, expected subject_id,item_id,correct,cot_length");
  }

  struct Cell { int r; double t; };
  std::vector<std::string> subjects, items;
  std::unordered_map<std::string, int> subj_idx, item_idx;
  std::unordered_map<long long, Cell> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) row_error(line_no, "expected 4 fields");
    if (f[0].empty() || f[1].empty()) row_error(line_no, "empty identifier");
    int r;
    if (f[2] == "0") r = 0;
    else if (f[2] == "1") r = 1;
    else row_error(line_no, "correct must be 0 or 1");
    double t;
    try {
      std::size_t pos = 0;
      t = std::stod(f[3], &pos);
      if (pos != f[3].size()) row_error(line_no, "malformed cot_length");
    } catch (const std::invalid_argument&) {
      row_error(line_no, "malformed cot_length");
    } catch (const std::out_of_range&) {
      row_error(line_no, "cot_length out of range");
    }
    if (!(t >= 1.0)) row_error(line_no, "cot_length must be >= 1");

    auto sit = subj_idx.find(f[0]);
    if (sit == subj_idx.end()) {
      sit = subj_idx.emplace(f[0], static_cast<int>(subjects.size())).first;
      subjects.push_back(f[0]);
    }
    auto iit = item_idx.find(f[1]);
    if (iit == item_idx.end()) {
      iit = item_idx.emplace(f[1], static_cast<int>(items.size())).first;
      items.push_back(f[1]);
    }
    const long long key =
        static_cast<long long>(sit->second) * (1LL << 32) + iit->second;
    if (!cells.emplace(key, Cell{r, t}).second)
      row_error(line_no, "duplicate (subject, item) pair");
  }
  if (cells.empty()) throw std::runtime_error("load_dataset: no data rows in " + path);

  ResponseDataset data;
  data.n_subjects = static_cast<int>(subjects.size());
  data.n_items = static_cast<int>(items.size());
  data.subject_ids = std::move(subjects);
  data.item_ids = std::move(items);
  data.R = Eigen::MatrixXi::Zero(data.n_subjects, data.n_items);
  data.T = Eigen::MatrixXd::Ones(data.n_subjects, data.n_items);
  const bool full = (static_cast<long long>(data.n_subjects) * data.n_items ==
                     static_cast<long long>(cells.size()));
  if (!full)
    data.mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(
        data.n_subjects, data.n_items);
  for (const auto& [key, cell] : cells) {
    const int i = static_cast<int>(key >> 32);
    const int j = static_cast<int>(key & 0xffffffffLL);
    data.R(i, j) = cell.r;
    data.T(i, j) = cell.t;
    if (!full) data.mask(i, j) = 1;
  }
  return data;
}

void save_dataset(const ResponseDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  out << "subject_id,item_id,correct,cot_length\n";
  for (int i = 0; i < data.n_subjects; ++i)
    for (int j = 0; j < data.n_items; ++j) {
      if (!data.observed(i, j)) continue;
      out << data.subject_ids[i] << ',' << data.item_ids[j] << ','
          << data.R(i, j) << ',' << format_double(data.T(i, j)) << '\n';
    }
  if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

std::string data_digest(const ResponseDataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  for (const auto& s : data.subject_ids) mix(s);
  for (const auto& s : data.item_ids) mix(s);
  for (int i = 0; i < data.n_subjects; ++i)
    for (int j = 0; j < data.n_items; ++j) {
      if (!data.observed(i, j)) {
        mix("-");
        continue;
      }
      mix(std::to_string(data.R(i, j)));
      mix(format_double(data.T(i, j)));
    }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_array(std::ostream& out, const char* key, const Eigen::VectorXd& v,
                 bool trailing_comma) {
  out << "  \"" << key << "\": [";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << format_double(v[i]);
  }
  out << "]" << (trailing_comma ? "," : "") << "\n";
}

}  // namespace

void save_model(const ModelFile& model, const std::string& path) {
  check_params(model.params);
  if (static_cast<int>(model.item_ids.size()) != model.params.n_items())
    throw std::domain_error("save_model: item_ids length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << "{\n";
  write_array(out, "a", model.params.a, true);
  write_array(out, "b", model.params.b, true);
  out << "  \"fit_meta\": {\n"
      << "    \"converged\": " << (model.meta.converged ? "true" : "false") << ",\n"
      << "    \"data_digest\": " << nlohmann::json(model.meta.data_digest).dump() << ",\n"
      << "    \"iters\": " << model.meta.iters << ",\n"
      << "    \"seed\": " << model.meta.seed << ",\n"
      << "    \"timestamp\": " << nlohmann::json(model.meta.timestamp).dump() << ",\n"
      << "    \"tol\": " << format_double(model.meta.tol) << "\n"
      << "  },\n";
  out << "  \"format_version\": " << model.format_version << ",\n";
  out << "  \"item_ids\": [";
  for (std::size_t i = 0; i < model.item_ids.size(); ++i) {
    if (i) out << ", ";
    out << nlohmann::json(model.item_ids[i]).dump();
  }
  out << "],\n";
  write_array(out, "lambda", model.params.lambda, true);
  out << "  \"mode\": \""
      << (model.params.mode == ModelMode::irt ? "irt" : "lart") << "\",\n";
  write_array(out, "omega", model.params.omega, true);
  write_array(out, "phi", model.params.phi, true);
  out << "  \"rho\": " << format_double(model.params.rho) << "\n";
  out << "}\n";
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_model: parse error in " + path + ": " + e.what());
  }
  ModelFile m;
  try {
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != 1)
      throw std::runtime_error("load_model: unsupported format_version " +
                               std::to_string(m.format_version));
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "lart") m.params.mode = ModelMode::lart;
    else if (mode == "irt") m.params.mode = ModelMode::irt;
    else throw std::runtime_error("load_model: unknown mode " + mode);

    auto vec = [&](const char* key) {
      const auto& arr = doc.at(key);
      Eigen::VectorXd v(arr.size());
      for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
      return v;
    };
    m.params.a = vec("a");
    m.params.b = vec("b");
    m.params.omega = vec("omega");
    m.params.phi = vec("phi");
    m.params.lambda = vec("lambda");
    m.params.rho = doc.at("rho").get<double>();
    m.item_ids = doc.at("item_ids").get<std::vector<std::string>>();

    const auto& meta = doc.at("fit_meta");
    m.meta.seed = meta.at("seed").get<std::uint64_t>();
    m.meta.iters = meta.at("iters").get<int>();
    m.meta.tol = meta.at("tol").get<double>();
    m.meta.converged = meta.at("converged").get<bool>();
    m.meta.timestamp = meta.at("timestamp").get<std::string>();
    m.meta.data_digest = meta.at("data_digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: schema violation in " + path + ": " +
                             e.what());
  }
  if (static_cast<int>(m.item_ids.size()) != m.params.n_items())
    throw std::runtime_error("load_model: item_ids length mismatch");
  check_params(m.params);
  return m;
}

}  // namespace lart
