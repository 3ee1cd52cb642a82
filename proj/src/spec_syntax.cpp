#include "cimeter/errors.hpp"
#include "cimeter/geometry.hpp"

#include <charconv>
#include <string>
#include <system_error>

namespace cimeter {

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw InputError("expected a number in '" + std::string(context) + "', got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_anchor(std::string_view text, std::string_view context) {
  std::vector<double> anchor;
  while (true) {
    const auto comma = text.find(',');
    anchor.push_back(parse_number(text.substr(0, comma), context));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return anchor;
}

// Splits "head:rest" at the first colon; rest is empty when there is none.
std::pair<std::string_view, std::string_view> split_head(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return {text, {}};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

}  // namespace

KernelSpec parse_kernel_spec(std::string_view text) {
  const auto [head, rest] = split_head(text);
  if (head == "gaussian") {
    if (rest.empty()) return KernelSpec::gaussian();
    return KernelSpec::gaussian(parse_number(rest, text));
  }
  if (head == "laplacian") {
    if (rest.empty()) return KernelSpec::laplacian();
    return KernelSpec::laplacian(parse_number(rest, text));
  }
  if (head == "dirac") {
    if (!rest.empty()) throw InputError("dirac kernel takes no parameters: '" + std::string(text) + "'");
    return KernelSpec::dirac();
  }
  if (text.starts_with("distance") && (text.size() == 8 || text[8] == ':' || text[8] == '@')) {
    std::string_view tail = text.substr(8);
    if (tail.starts_with(':')) tail.remove_prefix(1);
    std::string_view metric = tail;
    std::vector<double> anchor;
    if (const auto at = tail.rfind('@'); at != std::string_view::npos) {
      anchor = parse_anchor(tail.substr(at + 1), text);
      metric = tail.substr(0, at);
    }
    const SemimetricSpec rho = metric.empty() ? SemimetricSpec::euclidean() : parse_semimetric_spec(metric);
    return distance_induced_kernel(rho, std::move(anchor));
  }
  throw InputError("unknown kernel '" + std::string(text) +
                   "' (expected gaussian[:BW], laplacian[:SCALE], dirac or distance[:METRIC][@ANCHOR])");
}

SemimetricSpec parse_semimetric_spec(std::string_view text) {
  if (text == "euclidean") return SemimetricSpec::euclidean();
  if (text.starts_with("euclidean^")) {
    return SemimetricSpec::euclidean_power(parse_number(text.substr(10), text));
  }
  if (text.starts_with("kernel:")) return SemimetricSpec::kernel_induced(parse_kernel_spec(text.substr(7)));
  throw InputError("unknown metric '" + std::string(text) +
                   "' (expected euclidean, euclidean^ALPHA or kernel:KERNEL)");
}

std::string to_string(const SemimetricSpec& spec) {
  if (std::holds_alternative<semimetric::Euclidean>(spec.variant)) return "euclidean";
  if (const auto* p = std::get_if<semimetric::EuclideanPower>(&spec.variant)) {
    return "euclidean^" + format_number(p->alpha);
  }
  return "kernel:" + to_string(*std::get<semimetric::KernelInduced>(spec.variant).base);
}

std::string to_string(const KernelSpec& spec) {
  if (const auto* g = std::get_if<kernel::Gaussian>(&spec.variant)) {
    return g->bandwidth ? "gaussian:" + format_number(*g->bandwidth) : "gaussian";
  }
  if (const auto* l = std::get_if<kernel::Laplacian>(&spec.variant)) {
    return l->scale ? "laplacian:" + format_number(*l->scale) : "laplacian";
  }
  if (std::holds_alternative<kernel::DiracDiscrete>(spec.variant)) return "dirac";
  if (const auto* d = std::get_if<kernel::DistanceInduced>(&spec.variant)) {
    std::string out = "distance:" + to_string(*d->base);
    if (!d->anchor.empty()) {
      out += '@';
      for (std::size_t i = 0; i < d->anchor.size(); ++i) {
        if (i) out += ',';
        out += format_number(d->anchor[i]);
      }
    }
    return out;
  }
  const auto& p = std::get<kernel::Product>(spec.variant);
  return "product(" + std::to_string(p.split) + "," + to_string(*p.left) + "," + to_string(*p.right) + ")";
}

}  // namespace cimeter
