#pragma once

#include "cimeter/geometry.hpp"
#include "cimeter/unconditional.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cimeter {

/// Aligned observations (X_i, Y_i, Z_i). A discrete Z holds numeric labels, one column.
struct Dataset {
  PointSet x;
  PointSet y;
  PointSet z;
  bool z_discrete = false;
  std::vector<std::string> x_names;
  std::vector<std::string> y_names;
  std::vector<std::string> z_names;

  [[nodiscard]] Eigen::Index n() const noexcept { return x.rows(); }

  /// Equal row counts, n >= 1, finite entries, names (when present) matching widths.
  void validate() const;

  [[nodiscard]] PairedSample paired() const { return {x, y}; }

  /// Copy with rows reordered: row i of the result is row order[i] of this dataset.
  [[nodiscard]] Dataset reordered(const std::vector<Eigen::Index>& order) const;
};

/// Which CSV columns play X, Y and Z. Entries are column names, or 0-based indices
/// when a name does not match any header field.
struct ColumnRoleMap {
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> z;
  bool z_discrete = false;

  /// "x=a,b;y=c;z=d" with an optional ";z_kind=discrete".
  static ColumnRoleMap parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;
};

/// Comma-separated, mandatory header, '#' comment lines, optional "#roles: ..." line.
/// Explicit roles take precedence over the file's roles line.
Dataset read_csv(std::istream& in, const std::optional<ColumnRoleMap>& roles, std::string_view source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const std::optional<ColumnRoleMap>& roles = std::nullopt);

/// Writes the roles line, a header and rows with 17 significant digits.
void write_csv(std::ostream& out, const Dataset& d);
void save_csv(const std::filesystem::path& path, const Dataset& d);

enum class GeneratorModel { gaussian_ci, gaussian_dep, postnonlinear_ci, discrete_z_mixture };

GeneratorModel parse_generator_model(std::string_view text);
std::string to_string(GeneratorModel model);

struct GeneratorSpec {
  GeneratorModel model = GeneratorModel::gaussian_ci;
  double coupling = 0.0;  // gaussian_dep only
  int levels = 3;         // discrete_z_mixture only
  Eigen::Index n = 100;
  Eigen::Index p = 1;
  Eigen::Index q = 1;
  Eigen::Index r = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Synthetic data with known conditional-independence status:
///   gaussian_ci         Z ~ N(0,I), X = ZA' + e, Y = ZB' + e'       (X indep. Y | Z)
///   gaussian_dep(c)     as gaussian_ci, then Y[:,0] += c X[:,0]    (dependent for c != 0)
///   postnonlinear_ci    tanh applied to X and Y of gaussian_ci      (X indep. Y | Z)
///   discrete_z_mixture  Z uniform on levels, X and Y drawn independently per level
/// A and B have N(0, 1/r) entries drawn from the spec seed. Deterministic in the spec.
Dataset generate(const GeneratorSpec& spec);

}  // namespace cimeter
