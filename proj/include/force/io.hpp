#pragma once

#include <map>
#include <string>

#include "force/certificate.hpp"
#include "force/glatent.hpp"
#include "force/matlin.hpp"
#include "force/partition.hpp"
#include "force/problem.hpp"

namespace force {

// Plain CSV, one row per line, comma-separated decimals, no header.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& M);

// key=value text files; '#' starts a comment line.
using KvMap = std::map<std::string, std::string>;
KvMap read_kv(const std::string& path);
void write_kv(const std::string& path, const KvMap& kv);

// One line per group, comma-separated 1-based indices.
Partition read_partition(const std::string& path, Index d);
void write_partition(const std::string& path, const Partition& G);

// Instance header (kind, d, K or kappa_hat, d_csv) plus the matrix CSV it
// names; d_csv defaults to the header path with a .csv extension.
SdpInstance read_instance(const std::string& header_path);
void write_instance(const std::string& header_path, const SdpInstance& inst);

GLatentDesign read_design(const std::string& path);
void write_design(const std::string& path, const GLatentDesign& design);

// key=value summary plus a CSV of y next to it (path + ".y.csv").
void write_certificate(const std::string& path, const DualCertificate& cert);

std::string format_double(double x);

}  // namespace force
