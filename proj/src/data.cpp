#include "cimeter/dataset.hpp"

#include "cimeter/errors.hpp"
#include "cimeter/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cimeter {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

std::vector<std::string> to_strings(const std::vector<std::string_view>& views) {
  return {views.begin(), views.end()};
}

std::vector<std::string> default_names(char prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < count; ++i) names.push_back(std::string(1, prefix) + std::to_string(i));
  return names;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::size_t locate_column(const std::vector<std::string>& header, const std::string& key, std::string_view source) {
  if (const auto it = std::find(header.begin(), header.end(), key); it != header.end()) {
    return static_cast<std::size_t>(it - header.begin());
  }
  std::size_t index = 0;
  const auto res = std::from_chars(key.data(), key.data() + key.size(), index);
  if (res.ec == std::errc{} && res.ptr == key.data() + key.size() && index < header.size()) return index;
  throw InputError(std::string(source) + ": missing column '" + key + "'");
}

}  // namespace

void Dataset::validate() const {
  if (x.rows() < 1) throw InputError("dataset is empty");
  if (y.rows() != x.rows() || z.rows() != x.rows()) {
    throw InputError("dataset row mismatch: X " + std::to_string(x.rows()) + ", Y " + std::to_string(y.rows()) +
                     ", Z " + std::to_string(z.rows()));
  }
  if (x.cols() < 1 || y.cols() < 1 || z.cols() < 1) throw InputError("dataset roles need at least one column each");
  if (!x.allFinite() || !y.allFinite() || !z.allFinite()) throw InputError("dataset contains NaN or Inf");
  const auto check_names = [](const std::vector<std::string>& names, Eigen::Index cols, const char* role) {
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != cols) {
      throw InputError(std::string("dataset ") + role + " names do not match its column count");
    }
  };
  check_names(x_names, x.cols(), "X");
  check_names(y_names, y.cols(), "Y");
  check_names(z_names, z.cols(), "Z");
  if (z_discrete && z.cols() != 1) throw InputError("discrete Z must be a single label column");
}

Dataset Dataset::reordered(const std::vector<Eigen::Index>& order) const {
  Dataset out = *this;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out.x.row(row) = x.row(order[i]);
    out.y.row(row) = y.row(order[i]);
    out.z.row(row) = z.row(order[i]);
  }
  return out;
}

ColumnRoleMap ColumnRoleMap::parse(std::string_view text) {
  ColumnRoleMap roles;
  for (const auto part : split(text, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw InputError("role entry '" + std::string(part) + "' lacks '='");
    const auto key = trim(part.substr(0, eq));
    const auto value = trim(part.substr(eq + 1));
    if (key == "z_kind") {
      if (value == "discrete") {
        roles.z_discrete = true;
      } else if (value != "continuous") {
        throw InputError("z_kind must be 'discrete' or 'continuous', got '" + std::string(value) + "'");
      }
      continue;
    }
    auto columns = to_strings(split(value, ','));
    if (std::any_of(columns.begin(), columns.end(), [](const auto& c) { return c.empty(); })) {
      throw InputError("empty column name in role '" + std::string(key) + "'");
    }
    if (key == "x") {
      roles.x = std::move(columns);
    } else if (key == "y") {
      roles.y = std::move(columns);
    } else if (key == "z") {
      roles.z = std::move(columns);
    } else {
      throw InputError("unknown role '" + std::string(key) + "' (expected x, y, z or z_kind)");
    }
  }
  if (roles.x.empty() || roles.y.empty() || roles.z.empty()) {
    throw InputError("roles must name at least one column each for x, y and z: '" + std::string(text) + "'");
  }
  std::vector<std::string> all = roles.x;
  all.insert(all.end(), roles.y.begin(), roles.y.end());
  all.insert(all.end(), roles.z.begin(), roles.z.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw InputError("roles must be disjoint");
  return roles;
}

std::string ColumnRoleMap::to_string() const {
  std::string out = "x=" + join(x, ',') + ";y=" + join(y, ',') + ";z=" + join(z, ',');
  if (z_discrete) out += ";z_kind=discrete";
  return out;
}

Dataset read_csv(std::istream& in, const std::optional<ColumnRoleMap>& roles, std::string_view source) {
  std::optional<ColumnRoleMap> file_roles;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.starts_with("#roles:")) file_roles = ColumnRoleMap::parse(trim(view.substr(7)));
      continue;
    }
    auto fields = to_strings(split(view, ','));
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw InputError(std::string(source) + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, header has " + std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (header.empty()) throw InputError(std::string(source) + ": empty file (no header row)");
  if (rows.empty()) throw InputError(std::string(source) + ": no data rows");

  const ColumnRoleMap& map = roles ? *roles : file_roles ? *file_roles
                                                         : throw InputError(std::string(source) +
                                                                            ": no roles given and no #roles line");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto fill = [&](const std::vector<std::string>& keys, PointSet& target, std::vector<std::string>& names) {
    target.resize(n, static_cast<Eigen::Index>(keys.size()));
    for (std::size_t c = 0; c < keys.size(); ++c) {
      const std::size_t col = locate_column(header, keys[c], source);
      names.push_back(header[col]);
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::string& cell = rows[static_cast<std::size_t>(i)][col];
        double value = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        const std::string where = std::string(source) + ": row " + std::to_string(i + 1) + " (line " +
                                  std::to_string(line_numbers[static_cast<std::size_t>(i)]) + "), column '" +
                                  header[col] + "'";
        if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
          throw InputError(where + ": non-numeric value '" + cell + "'");
        }
        if (!std::isfinite(value)) throw InputError(where + ": value '" + cell + "' is not finite");
        target(i, static_cast<Eigen::Index>(c)) = value;
      }
    }
  };

  Dataset d;
  fill(map.x, d.x, d.x_names);
  fill(map.y, d.y, d.y_names);
  fill(map.z, d.z, d.z_names);
  d.z_discrete = map.z_discrete;
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<ColumnRoleMap>& roles) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_csv(in, roles, path.string());
}

void write_csv(std::ostream& out, const Dataset& d) {
  d.validate();
  ColumnRoleMap roles;
  roles.x = d.x_names.empty() ? default_names('x', d.x.cols()) : d.x_names;
  roles.y = d.y_names.empty() ? default_names('y', d.y.cols()) : d.y_names;
  roles.z = d.z_names.empty() ? default_names('z', d.z.cols()) : d.z_names;
  roles.z_discrete = d.z_discrete;

  std::vector<std::string> header = roles.x;
  header.insert(header.end(), roles.y.begin(), roles.y.end());
  header.insert(header.end(), roles.z.begin(), roles.z.end());

  out << "#roles: " << roles.to_string() << '\n' << join(header, ',') << '\n';
  char buf[32];
  const auto emit_row = [&](const PointSet& m, Eigen::Index i, bool& first) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, c));
      if (!first) out << ',';
      out << buf;
      first = false;
    }
  };
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    bool first = true;
    emit_row(d.x, i, first);
    emit_row(d.y, i, first);
    emit_row(d.z, i, first);
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_csv(out, d);
}

GeneratorModel parse_generator_model(std::string_view text) {
  if (text == "gaussian_ci") return GeneratorModel::gaussian_ci;
  if (text == "gaussian_dep") return GeneratorModel::gaussian_dep;
  if (text == "postnonlinear_ci") return GeneratorModel::postnonlinear_ci;
  if (text == "discrete_z_mixture") return GeneratorModel::discrete_z_mixture;
  throw InputError("unknown generator model '" + std::string(text) +
                   "' (expected gaussian_ci, gaussian_dep, postnonlinear_ci or discrete_z_mixture)");
}

std::string to_string(GeneratorModel model) {
  switch (model) {
    case GeneratorModel::gaussian_ci: return "gaussian_ci";
    case GeneratorModel::gaussian_dep: return "gaussian_dep";
    case GeneratorModel::postnonlinear_ci: return "postnonlinear_ci";
    case GeneratorModel::discrete_z_mixture: return "discrete_z_mixture";
  }
  return "unknown";
}

void GeneratorSpec::validate() const {
  if (n < 1) throw InputError("generator needs n >= 1");
  if (p < 1 || q < 1 || r < 1) throw InputError("generator dimensions p, q, r must be >= 1");
  if (model == GeneratorModel::discrete_z_mixture) {
    if (levels < 1) throw InputError("discrete_z_mixture needs levels >= 1");
    if (r != 1) throw InputError("discrete_z_mixture emits a single label column; r must be 1");
  }
  if (!std::isfinite(coupling)) throw InputError("coupling must be finite");
}

Dataset generate(const GeneratorSpec& spec) {
  spec.validate();
  // one stream per role so that the coupling never shifts other draws
  CounterRng coefficients(spec.seed, 1);
  CounterRng z_stream(spec.seed, 2);
  CounterRng x_noise(spec.seed, 3);
  CounterRng y_noise(spec.seed, 4);

  Dataset d;
  d.x.resize(spec.n, spec.p);
  d.y.resize(spec.n, spec.q);
  d.z.resize(spec.n, spec.r);
  d.x_names = default_names('x', spec.p);
  d.y_names = default_names('y', spec.q);
  d.z_names = default_names('z', spec.r);

  if (spec.model == GeneratorModel::discrete_z_mixture) {
    PointSet mean_x(spec.levels, spec.p);
    PointSet mean_y(spec.levels, spec.q);
    for (Eigen::Index i = 0; i < mean_x.size(); ++i) mean_x.data()[i] = coefficients.normal();
    for (Eigen::Index i = 0; i < mean_y.size(); ++i) mean_y.data()[i] = coefficients.normal();
    for (Eigen::Index i = 0; i < spec.n; ++i) {
      const auto level = static_cast<Eigen::Index>(z_stream.below(static_cast<std::uint64_t>(spec.levels)));
      d.z(i, 0) = static_cast<double>(level);
      for (Eigen::Index c = 0; c < spec.p; ++c) d.x(i, c) = mean_x(level, c) + x_noise.normal();
      for (Eigen::Index c = 0; c < spec.q; ++c) d.y(i, c) = mean_y(level, c) + y_noise.normal();
    }
    d.z_discrete = true;
    return d;
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.r));
  Eigen::MatrixXd a(spec.p, spec.r);
  Eigen::MatrixXd b(spec.q, spec.r);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = scale * coefficients.normal();
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = scale * coefficients.normal();

  for (Eigen::Index i = 0; i < d.z.size(); ++i) d.z.data()[i] = z_stream.normal();
  PointSet ex(spec.n, spec.p);
  PointSet ey(spec.n, spec.q);
  for (Eigen::Index i = 0; i < ex.size(); ++i) ex.data()[i] = x_noise.normal();
  for (Eigen::Index i = 0; i < ey.size(); ++i) ey.data()[i] = y_noise.normal();

  d.x = d.z * a.transpose() + ex;
  d.y = d.z * b.transpose() + ey;

  if (spec.model == GeneratorModel::gaussian_dep && spec.coupling != 0.0) {
    d.y.col(0) += spec.coupling * d.x.col(0);
  }
  if (spec.model == GeneratorModel::postnonlinear_ci) {
    d.x = d.x.array().tanh().matrix();
    d.y = d.y.array().tanh().matrix();
  }
  return d;
}

}  // namespace cimeter
