#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tariffkit/datagen.hpp"
#include "tariffkit/dynamics.hpp"
#include "tariffkit/market_model.hpp"

namespace tariffkit::io {

// Shortest decimal string that reads back to the same double.
std::string format_number(double x);

// Comma-separated, header row mandatory, '.' decimal point. Fields never
// contain commas or quotes, so no quoting is performed or accepted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string source;  // file name for diagnostics

  /// Throws SchemaError naming the column when it is absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  /// Parses rows[row][col]; SchemaError names the column and 1-based data row.
  double number(std::size_t row, std::size_t col) const;
  long integer(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);
std::string to_csv(const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Panel: state_id,year,outcome,exposure[,extra columns].
CsvTable panel_table(const StatePanel& panel);
StatePanel panel_from_table(const CsvTable& table);

// Series: t,<names...>[,dummy]. Shocks: t,shock_<name>...
CsvTable series_table(const TimeSeriesPanel& series);
CsvTable shocks_table(const TimeSeriesPanel& series);
struct SeriesData {
  std::vector<std::string> names;
  Matrix observations;
  std::optional<Vector> dummy;
};
/// Every column other than `t` and `dummy_column` is a variable, unless
/// `variables` selects a subset (in that order).
SeriesData series_from_table(const CsvTable& table, const std::string& dummy_column = "dummy",
                             const std::vector<std::string>& variables = {});

// Supply-demand sample: t,log_price,log_quantity,tariff,china_ip,weather1,weather2.
CsvTable supply_demand_table(const SupplyDemandSample& sample);
SupplyDemandSample supply_demand_from_table(const CsvTable& table);

CsvTable path_table(const std::vector<SeasonRecord>& path);
CsvTable equilibrium_table(const std::vector<EquilibriumSolution>& solutions);
CsvTable two_exporter_table(const std::vector<TwoExporterSolution>& solutions);

}  // namespace tariffkit::io
