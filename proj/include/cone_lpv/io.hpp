#pragma once

// JSON files and reports.
//
// System file:
//   {"n_x": 2, "N": 2, "vertices": [[[..],[..]], ...], "B": [[..]], "C": [[..]]}
// Certificate file:
//   {"schema_version": 1, "analysis": "stability", "kind": "nonexistence",
//    "normalization": 1.0, "index_convention": "column",
//    "blocks": [ {"i": 1, "j": 1, "matrix": [[..]]}, ... ]}
// "blocks" may also be a plain list of matrices: P_i / S_i / P for existence
// certificates, R_1..R_N for ct-cqlf weights (R_0 in "r0"), or N^2 dual
// blocks in flat order read through "index_convention".

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cone_lpv/jsr.hpp"
#include "cone_lpv/model.hpp"
#include "cone_lpv/verify.hpp"

namespace cone_lpv::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Unreadable, malformed or inconsistent input file.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::vector<std::string> findings = {});
  const std::vector<std::string>& findings() const { return findings_; }

 private:
  std::vector<std::string> findings_;
};

using Certificate = std::variant<ExistenceCertificate, NonexistenceCertificate>;

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

Matrix matrix_from_json(const json& j, const std::string& what);
json to_json(const Matrix& m);
json to_json(const SymMatrix& m);

/// Runs model::validate() and throws InputError with its findings.
PolytopicSystem system_from_json(const json& j);
json to_json(const PolytopicSystem& system);
PolytopicSystem load_system(const std::filesystem::path& path);

/// vertex_count resolves flat dual block lists.
Certificate certificate_from_json(const json& j, std::size_t vertex_count);
json to_json(const ExistenceCertificate& cert);
json to_json(const NonexistenceCertificate& cert);
json to_json(const Certificate& cert);
Certificate load_certificate(const std::filesystem::path& path, std::size_t vertex_count);

json to_json(const VerificationReport& report);
json to_json(const Verdict& verdict);
json to_json(const jsr::JsrBounds& bounds);

}  // namespace cone_lpv::io
