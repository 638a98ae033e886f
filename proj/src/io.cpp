#include "force/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace force {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::string sibling_csv(const std::string& header_path) {
  const auto dot = header_path.find_last_of('.');
  const auto slash = header_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return header_path + ".csv";
  return header_path.substr(0, dot) + ".csv";
}

std::string dir_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream f = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error("ragged CSV: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV: " + path);
  Matrix M(Index(rows.size()), Index(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[size_t(i)][size_t(j)];
  return M;
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
  std::ofstream f = open_out(path);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) f << ',';
      f << format_double(M(i, j));
    }
    f << '\n';
  }
}

KvMap read_kv(const std::string& path) {
  std::ifstream f = open_in(path);
  KvMap kv;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad key=value line in " + path + ": " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void write_kv(const std::string& path, const KvMap& kv) {
  std::ofstream f = open_out(path);
  for (const auto& [k, v] : kv) f << k << '=' << v << '\n';
}

Partition read_partition(const std::string& path, Index d) {
  std::ifstream f = open_in(path);
  std::vector<std::vector<Index>> groups;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<Index> grp;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) grp.push_back(Index(std::stoll(cell)) - 1);
    groups.push_back(std::move(grp));
  }
  return Partition(std::move(groups), d);
}

void write_partition(const std::string& path, const Partition& G) {
  std::ofstream f = open_out(path);
  for (const auto& grp : G.groups) {
    for (size_t i = 0; i < grp.size(); ++i) {
      if (i) f << ',';
      f << grp[i] + 1;
    }
    f << '\n';
  }
}

SdpInstance read_instance(const std::string& header_path) {
  const KvMap kv = read_kv(header_path);
  const auto need = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error("instance header missing key: " + k);
    return it->second;
  };
  std::string csv = kv.count("d_csv") ? dir_of(header_path) + kv.at("d_csv")
                                      : sibling_csv(header_path);
  Matrix D = read_matrix_csv(csv);
  const Index d = Index(std::stoll(need("d")));
  if (D.rows() != d) throw std::runtime_error("instance header d does not match the matrix");
  const std::string kind = need("kind");
  if (kind == "fixed") return SdpInstance::fixed(std::move(D), Index(std::stoll(need("K"))));
  if (kind == "adaptive") return SdpInstance::adaptive(std::move(D), std::stod(need("kappa_hat")));
  throw std::runtime_error("instance kind must be fixed or adaptive");
}

void write_instance(const std::string& header_path, const SdpInstance& inst) {
  KvMap kv;
  kv["d"] = std::to_string(inst.dim());
  if (inst.kind == SdpKind::Fixed) {
    kv["kind"] = "fixed";
    kv["K"] = std::to_string(inst.K);
  } else {
    kv["kind"] = "adaptive";
    kv["kappa_hat"] = format_double(inst.kappa);
  }
  write_kv(header_path, kv);
  write_matrix_csv(sibling_csv(header_path), inst.D);
}

GLatentDesign read_design(const std::string& path) {
  const KvMap kv = read_kv(path);
  GLatentDesign design;
  design.d = Index(std::stoll(kv.at("d")));
  design.K = Index(std::stoll(kv.at("K")));
  if (kv.count("rho")) design.rho = std::stod(kv.at("rho"));
  if (kv.count("gamma")) design.gamma = std::stod(kv.at("gamma"));
  if (kv.count("seed")) design.seed = std::stoull(kv.at("seed"));
  if (kv.count("sizes")) {
    std::stringstream ss(kv.at("sizes"));
    std::string cell;
    while (std::getline(ss, cell, ',')) design.group_sizes.push_back(Index(std::stoll(cell)));
  }
  return design;
}

void write_design(const std::string& path, const GLatentDesign& design) {
  KvMap kv;
  kv["d"] = std::to_string(design.d);
  kv["K"] = std::to_string(design.K);
  kv["rho"] = format_double(design.rho);
  kv["gamma"] = format_double(design.gamma);
  kv["seed"] = std::to_string(design.seed);
  if (!design.group_sizes.empty()) {
    std::string sizes;
    for (size_t i = 0; i < design.group_sizes.size(); ++i) {
      if (i) sizes += ',';
      sizes += std::to_string(design.group_sizes[i]);
    }
    kv["sizes"] = sizes;
  }
  write_kv(path, kv);
}

void write_certificate(const std::string& path, const DualCertificate& cert) {
  KvMap kv;
  kv[cert.kind == SdpKind::Fixed ? "y_T" : "kappa"] = format_double(cert.y_T);
  kv["value"] = format_double(cert.value);
  kv["min_cross_yab"] = format_double(cert.min_cross_yab);
  kv["min_block_eig"] = format_double(cert.min_block_eig);
  kv["feasible"] = cert.feasible ? "true" : "false";
  write_kv(path, kv);
  write_matrix_csv(path + ".y.csv", cert.y);
}

}  // namespace force
