#include "gwd/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gwd/error.hpp"

namespace gwd {

namespace {

std::string meta_path_for(const std::string& csv_path) {
  std::string base = csv_path;
  if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") {
    base = base.substr(0, base.size() - 4);
  }
  return base + ".meta.json";
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_snapshot(const GridFunction& f, const std::string& field_name,
                    const std::string& csv_path) {
  const Grid3& g = f.grid();
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for write: " + csv_path);
  out << "theta,eta,v,value\n";
  for (int k = 0; k < g.n_v; ++k) {
    for (int j = 0; j < g.n_eta; ++j) {
      for (int i = 0; i < g.n_theta; ++i) {
        out << fmt17(g.theta(i)) << ',' << fmt17(g.eta(j)) << ','
            << fmt17(g.v(k)) << ',' << fmt17(f(i, j, k)) << '\n';
      }
    }
  }
  out.close();

  nlohmann::json meta;
  meta["n_theta"] = g.n_theta;
  meta["n_eta"] = g.n_eta;
  meta["n_v"] = g.n_v;
  meta["origins"] = {g.theta0, g.eta0, g.v0};
  meta["spacings"] = {g.d_theta, g.d_eta, g.d_v};
  meta["field_name"] = field_name;
  std::ofstream mout(meta_path_for(csv_path), std::ios::binary);
  if (!mout) throw ConfigError("cannot open for write: " + meta_path_for(csv_path));
  mout << meta.dump(2) << '\n';
}

Snapshot read_snapshot(const std::string& csv_path) {
  std::ifstream min(meta_path_for(csv_path));
  if (!min) throw ConfigError("missing sidecar: " + meta_path_for(csv_path));
  nlohmann::json meta;
  min >> meta;

  Grid3 g;
  g.n_theta = meta.at("n_theta").get<int>();
  g.n_eta = meta.at("n_eta").get<int>();
  g.n_v = meta.at("n_v").get<int>();
  const auto& org = meta.at("origins");
  const auto& sp = meta.at("spacings");
  g.theta0 = org.at(0).get<double>();
  g.eta0 = org.at(1).get<double>();
  g.v0 = org.at(2).get<double>();
  g.d_theta = sp.at(0).get<double>();
  g.d_eta = sp.at(1).get<double>();
  g.d_v = sp.at(2).get<double>();

  Snapshot snap{GridFunction(g), meta.at("field_name").get<std::string>()};

  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open: " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  std::size_t idx = 0;
  auto vals = snap.field.values();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (idx >= vals.size()) throw ConfigError("snapshot CSV longer than grid");
    const auto pos = line.rfind(',');
    if (pos == std::string::npos) throw ConfigError("malformed CSV row");
    vals[idx++] = std::stod(line.substr(pos + 1));
  }
  if (idx != vals.size()) throw ConfigError("snapshot CSV shorter than grid");
  return snap;
}

}  // namespace gwd
