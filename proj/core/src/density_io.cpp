#include "ruzsa/density_io.hpp"

#include <fstream>
#include <sstream>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) r[static_cast<std::size_t>(k)] = m(i, k);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw ParseError("empty matrix");
  const auto c = static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd m(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(r.size()) != c) throw ParseError("ragged matrix");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = r.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

json params_json(const ParametricDensity& d) {
  return std::visit(overloaded{
                        [](const GaussianParams& p) {
                          return json{{"family", "gaussian"}, {"mean", vector_json(p.mean)}, {"cov", matrix_json(p.cov)}};
                        },
                        [](const ExponentialParams& p) { return json{{"family", "exponential"}, {"rate", p.rate}}; },
                        [](const UniformParams& p) { return json{{"family", "uniform"}, {"lo", p.lo}, {"hi", p.hi}}; },
                        [](const LaplaceParams& p) {
                          return json{{"family", "laplace"}, {"location", p.location}, {"scale", p.scale}};
                        },
                        [](const GammaParams& p) {
                          return json{{"family", "gamma"}, {"shape", p.shape}, {"rate", p.rate}};
                        },
                        [](const LogNormalParams& p) {
                          return json{{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
                        },
                    },
                    d.family());
}

ParametricDensity params_from(const json& p) {
  const auto family = p.at("family").get<std::string>();
  if (family == "gaussian") {
    const auto mean = p.at("mean").get<std::vector<double>>();
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    return ParametricDensity::gaussian(m, matrix_from(p.at("cov")));
  }
  if (family == "exponential") return ParametricDensity::exponential(p.at("rate").get<double>());
  if (family == "uniform") {
    return ParametricDensity::uniform(p.at("lo").get<std::vector<double>>(), p.at("hi").get<std::vector<double>>());
  }
  if (family == "laplace") return ParametricDensity::laplace(p.value("location", 0.0), p.at("scale").get<double>());
  if (family == "gamma") return ParametricDensity::gamma(p.at("shape").get<double>(), p.at("rate").get<double>());
  if (family == "lognormal") return ParametricDensity::lognormal(p.at("mu").get<double>(), p.at("sigma").get<double>());
  throw ParseError("unknown parametric family '" + family + "'");
}

void check_version(const json& j) {
  if (!j.is_object()) throw ParseError("density document must be a JSON object");
  if (j.value("version", 1) != 1) throw ParseError("unsupported density schema version");
}

}  // namespace

json density_to_json(const Density& d) {
  return std::visit(
      overloaded{
          [](const FinitePMF& p) {
            return json{{"version", 1},
                        {"type", "finite"},
                        {"group", group_to_json(p.group())},
                        {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
          },
          [](const GridDensity& g) {
            std::vector<double> lo, hi;
            std::vector<std::size_t> cells;
            std::vector<bool> periodic;
            for (const auto& a : g.axes()) {
              lo.push_back(a.lo);
              hi.push_back(a.hi);
              cells.push_back(a.cells);
              periodic.push_back(a.periodic);
            }
            return json{{"version", 1},
                        {"type", "grid"},
                        {"group", group_to_json(g.group())},
                        {"box", {{"lo", lo}, {"hi", hi}, {"cells", cells}, {"periodic", periodic}}},
                        {"masses", std::vector<double>(g.masses().begin(), g.masses().end())},
                        {"truncated_mass", g.truncated_mass()}};
          },
          [](const ParametricDensity& p) {
            return json{{"version", 1}, {"type", "parametric"}, {"group", group_to_json(p.group())},
                        {"params", params_json(p)}};
          },
      },
      d);
}

Density density_from_json(const json& j) {
  try {
    check_version(j);
    const auto type = j.at("type").get<std::string>();
    if (type == "finite") {
      return FinitePMF(group_from_json(j.at("group")), j.at("probs").get<std::vector<double>>());
    }
    if (type == "grid") {
      const auto& box = j.at("box");
      const auto lo = box.at("lo").get<std::vector<double>>();
      const auto hi = box.at("hi").get<std::vector<double>>();
      const auto cells = box.at("cells").get<std::vector<std::size_t>>();
      const auto periodic = box.value("periodic", std::vector<bool>(lo.size(), false));
      if (hi.size() != lo.size() || cells.size() != lo.size() || periodic.size() != lo.size()) {
        throw ParseError("grid box arrays have different lengths");
      }
      std::vector<GridAxis> axes;
      for (std::size_t i = 0; i < lo.size(); ++i) axes.push_back({lo[i], hi[i], cells[i], periodic[i]});
      GroupSpec g = j.contains("group") ? group_from_json(j.at("group")) : GroupSpec::real(static_cast<int>(lo.size()));
      return GridDensity(std::move(g), std::move(axes), j.at("masses").get<std::vector<double>>(),
                         j.value("truncated_mass", 0.0));
    }
    if (type == "parametric") return params_from(j.at("params"));
    throw ParseError("unknown density type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed density document: ") + e.what());
  }
}

json joint_to_json(const JointPMF& j) {
  json groups = json::array();
  for (const auto& g : j.groups()) groups.push_back(group_to_json(g));
  return json{{"version", 1},
              {"type", "joint"},
              {"groups", groups},
              {"tensor", std::vector<double>(j.tensor().begin(), j.tensor().end())}};
}

JointPMF joint_from_json(const json& j) {
  try {
    check_version(j);
    if (j.value("type", "joint") != "joint") throw ParseError("expected a joint document");
    std::vector<GroupSpec> groups;
    for (const auto& g : j.at("groups")) groups.push_back(group_from_json(g));
    return JointPMF(std::move(groups), j.at("tensor").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed joint document: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_density(const std::filesystem::path& path, const Density& d) {
  write_text_file(path, density_to_json(d).dump(2) + "\n");
}

Density read_density(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return density_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string masses_csv(const Density& d) {
  std::ostringstream out;
  out.precision(17);
  std::visit(overloaded{
                 [&](const FinitePMF& p) {
                   out << "index,mass\n";
                   for (std::size_t i = 0; i < p.size(); ++i) out << i << ',' << p[i] << '\n';
                 },
                 [&](const GridDensity& g) {
                   out << "index";
                   for (std::size_t a = 0; a < g.dim(); ++a) out << ",x" << a;
                   out << ",mass\n";
                   const auto strides = g.strides();
                   for (std::size_t c = 0; c < g.total_cells(); ++c) {
                     out << c;
                     for (std::size_t a = 0; a < g.dim(); ++a) {
                       const auto& ax = g.axes()[a];
                       const std::size_t i = (c / strides[a]) % ax.cells;
                       out << ',' << (ax.degenerate() ? ax.lo : ax.midpoint(i));
                     }
                     out << ',' << g.masses()[c] << '\n';
                   }
                 },
                 [&](const ParametricDensity&) { throw DomainError("CSV export needs a finite or grid density"); },
             },
             d);
  return out.str();
}

}  // namespace ruzsa
