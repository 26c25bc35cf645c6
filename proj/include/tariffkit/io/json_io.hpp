#pragma once

#include <json.hpp>
#include <string>

#include "tariffkit/calibration.hpp"
#include "tariffkit/datagen.hpp"
#include "tariffkit/dynamics.hpp"
#include "tariffkit/econometrics/did.hpp"
#include "tariffkit/econometrics/iv.hpp"
#include "tariffkit/econometrics/var.hpp"
#include "tariffkit/market_model.hpp"
#include "tariffkit/montecarlo.hpp"

namespace tariffkit::io {

// Object keys keep insertion order, so emitted files are byte-stable.
using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // array of rows

Json to_json(const MarketBaseline& b);
Json to_json(const ElasticityParams& e);
Json to_json(const TariffScenario& t);
Json to_json(const DynamicsParams& d);
Json to_json(const ShockPath& s);
Json to_json(const EquilibriumSolution& s);
Json to_json(const SeasonRecord& r);
Json to_json(const TwoExporterMarket& m);
Json to_json(const TwoExporterSolution& s);
Json to_json(const CalibrationTargets& t);
Json to_json(const CalibrationGrid& g);
Json to_json(const CalibrationResult& r);

Json to_json(const ExposureRule& r);
Json to_json(const PanelSpec& s);
Json to_json(const VarSpec& s);
Json to_json(const SupplyDemandSpec& s);

Json to_json(const RegressionResult& r);
Json to_json(const DidResult& r);
Json to_json(const VarModel& m);
Json to_json(const StructuralId& id);
Json to_json(const IvResult& r);
Json to_json(const SupplyDemandFit& f);
Json to_json(const McResult& r);

// Overlay a JSON object onto an existing value. Keys that are absent keep
// their current value; unknown keys and wrongly typed values throw
// ConfigError naming the offending path (e.g. "simulate.dynamics.beta").
void merge(const Json& j, MarketBaseline& out, const std::string& path);
void merge(const Json& j, ElasticityParams& out, const std::string& path);
void merge(const Json& j, TariffScenario& out, const std::string& path);
void merge(const Json& j, DynamicsParams& out, const std::string& path);
void merge(const Json& j, ShockPath& out, const std::string& path);
void merge(const Json& j, TwoExporterMarket& out, const std::string& path);
void merge(const Json& j, CalibrationTargets& out, const std::string& path);
void merge(const Json& j, CalibrationGrid& out, const std::string& path);
void merge(const Json& j, ExposureRule& out, const std::string& path);
void merge(const Json& j, PanelSpec& out, const std::string& path);
void merge(const Json& j, VarSpec& out, const std::string& path);
void merge(const Json& j, SupplyDemandSpec& out, const std::string& path);

/// Strict reader for one JSON object: every key must be consumed before
/// finish() or the leftover keys are reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  std::string child_path(const std::string& key) const;

  void read(const std::string& key, double& out);
  void read(const std::string& key, int& out);
  void read(const std::string& key, long& out);
  void read(const std::string& key, std::size_t& out);
  void read(const std::string& key, bool& out);
  void read(const std::string& key, std::string& out);
  void read(const std::string& key, std::vector<double>& out);
  void read(const std::string& key, std::vector<int>& out);
  void read(const std::string& key, std::vector<std::string>& out);
  void read(const std::string& key, Vector& out);
  void read(const std::string& key, Matrix& out);

  template <class T>
  void read_into(const std::string& key, T& out) {
    if (has(key)) merge(raw(key), out, child_path(key));
  }

  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::vector<std::string> used_;
};

Json parse_json(const std::string& text, const std::string& source);

/// Two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace tariffkit::io
