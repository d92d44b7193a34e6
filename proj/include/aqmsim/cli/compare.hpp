#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqmsim/cli/runner.hpp"

namespace aqmsim::cli {

namespace detail {

inline nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return j;
}

/// Scenario identity ignoring the discipline under comparison and seeds.
inline nlohmann::json comparison_shape(const nlohmann::json& aggregate) {
  nlohmann::json s = aggregate.at("scenario");
  s.erase("aqm");
  s.erase("seed");
  s.erase("replication");
  s["replications"] = aggregate.at("replications");
  return s;
}

inline nlohmann::json dist_delta(const nlohmann::json& a, const nlohmann::json& b) {
  nlohmann::json d;
  for (const char* key : {"mean", "p50", "p75", "p90", "p95", "max"}) {
    if (a.contains(key) && b.contains(key)) {
      d[std::string(key) + "_delta"] = b[key].get<double>() - a[key].get<double>();
    }
  }
  return d;
}

}  // namespace detail

/// Side-by-side report of two completed run directories with the same
/// scenario shape (the AQM may differ): summary deltas (B - A), percentile
/// grids for CDF overlays, and download-time boxplot data per file size.
inline RunOutcome compare_runs(const std::string& dir_a, const std::string& dir_b,
                               const std::string& out_dir) {
  try {
    const nlohmann::json a = detail::load_json(std::filesystem::path(dir_a) / "aggregate.json");
    const nlohmann::json b = detail::load_json(std::filesystem::path(dir_b) / "aggregate.json");

    if (detail::comparison_shape(a) != detail::comparison_shape(b)) {
      return {2, "scenario shapes differ; runs are not comparable"};
    }

    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);

    nlohmann::json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["a"] = {{"dir", dir_a}, {"aqm", a.at("scenario").at("aqm")}};
    rep["b"] = {{"dir", dir_b}, {"aqm", b.at("scenario").at("aqm")}};
    rep["queuing_delay_ns"] =
        detail::dist_delta(a.at("queuing_delay_ns"), b.at("queuing_delay_ns"));
    nlohmann::json by_class = nlohmann::json::object();
    for (const auto& [cls, dist] : a.at("queuing_delay_by_class_ns").items()) {
      by_class[cls] = detail::dist_delta(dist, b.at("queuing_delay_by_class_ns").at(cls));
    }
    rep["queuing_delay_by_class_ns"] = by_class;
    rep["utilization_mean_delta"] = b.at("utilization").at("mean").get<double>() -
                                    a.at("utilization").at("mean").get<double>();
    nlohmann::json goodput = nlohmann::json::object();
    for (const auto& [cls, dist] : a.at("goodput_bps").items()) {
      goodput[cls] = detail::dist_delta(dist, b.at("goodput_bps").at(cls));
    }
    rep["goodput_bps"] = goodput;
    nlohmann::json downloads = nlohmann::json::object();
    for (const auto& [size, dist] : a.at("downloads").items()) {
      if (b.at("downloads").contains(size)) {
        downloads[size] = detail::dist_delta(dist, b.at("downloads").at(size));
      }
    }
    rep["downloads_ns"] = downloads;
    detail::write_text(out / "compare.json", rep.dump(2) + "\n");

    // Queuing-delay CDF overlay from the stored percentile grids.
    {
      std::string csv = "percentile,a_delay_ns,b_delay_ns\n";
      const auto& ga = a.at("queuing_delay_ns").at("grid");
      const auto& gb = b.at("queuing_delay_ns").at("grid");
      for (int q = 0; q <= 100; ++q) {
        csv += std::to_string(q) + "," + ga.at(q).dump() + "," + gb.at(q).dump() + "\n";
      }
      detail::write_text(out / "qdelay_cdf.csv", csv);
    }
    {
      std::string csv = "class,percentile,a_bps,b_bps\n";
      for (const auto& [cls, dist] : a.at("goodput_bps").items()) {
        if (!dist.contains("grid")) continue;
        const auto& ga = dist.at("grid");
        const auto& gb = b.at("goodput_bps").at(cls).at("grid");
        for (int q = 0; q <= 100; ++q) {
          csv += cls + "," + std::to_string(q) + "," + ga.at(q).dump() + "," +
                 gb.at(q).dump() + "\n";
        }
      }
      detail::write_text(out / "goodput_cdf.csv", csv);
    }
    {
      std::string csv = "size_bytes,run,p5_ns,p25_ns,p50_ns,p75_ns,p95_ns\n";
      auto emit_row = [&](const std::string& size, const char* tag, const nlohmann::json& d) {
        if (!d.contains("p5")) return;
        csv += size;
        csv += ",";
        csv += tag;
        for (const char* key : {"p5", "p25", "p50", "p75", "p95"}) {
          csv += "," + d.at(key).dump();
        }
        csv += "\n";
      };
      for (const auto& [size, dist] : a.at("downloads").items()) {
        emit_row(size, "a", dist);
        if (b.at("downloads").contains(size)) emit_row(size, "b", b.at("downloads").at(size));
      }
      detail::write_text(out / "downloads_boxplot.csv", csv);
    }
    return {0, {}};
  } catch (const ConfigError& e) {
    return {2, e.what()};
  } catch (const std::exception& e) {
    return {3, e.what()};
  }
}

}  // namespace aqmsim::cli
