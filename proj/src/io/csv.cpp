#include "tariffkit/io/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "tariffkit/errors.hpp"

namespace tariffkit::io {

std::string format_number(double x) { return fmt::format("{}", x); }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  throw SchemaError(fmt::format("{}: missing required column '{}'", source, name), name, 0);
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw SchemaError(fmt::format("{}: row {}, column '{}': '{}' is not a number", source, row + 1,
                                  header[col], s),
                      header[col], row + 1);
  }
  return v;
}

long CsvTable::integer(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw SchemaError(fmt::format("{}: row {}, column '{}': '{}' is not an integer", source,
                                  row + 1, header[col], s),
                      header[col], row + 1);
  }
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    if (line.find('"') != std::string::npos) {
      throw SchemaError(fmt::format("{}: line {}: quoted fields are not supported", source, line_no),
                        "", line_no);
    }
    auto fields = split(line);
    if (!have_header) {
      for (const auto& f : fields) {
        if (f.empty()) throw SchemaError(fmt::format("{}: empty column name in header", source), "", 0);
      }
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw SchemaError(fmt::format("{}: row {} has {} fields, header has {}", source,
                                    t.rows.size() + 1, fields.size(), t.header.size()),
                        "", t.rows.size() + 1);
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw SchemaError(fmt::format("{}: no header row", source), "", 0);
  return t;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path), path.filename().string());
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out.push_back(',');
      out += fields[i];
    }
    out.push_back('\n');
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

// ---------------------------------------------------------------------------

CsvTable panel_table(const StatePanel& panel) {
  CsvTable t;
  t.header = {"state_id", "year", "outcome", "exposure"};
  for (const auto& n : panel.extra_names) t.header.push_back(n);
  for (std::size_t r = 0; r < panel.rows.size(); ++r) {
    const auto& row = panel.rows[r];
    std::vector<std::string> f{fmt::format("{}", row.state_id), fmt::format("{}", row.year),
                               format_number(row.outcome), format_number(row.exposure)};
    for (const auto& col : panel.extra) f.push_back(format_number(col[r]));
    t.rows.push_back(std::move(f));
  }
  return t;
}

StatePanel panel_from_table(const CsvTable& t) {
  const std::size_t c_state = t.column("state_id");
  const std::size_t c_year = t.column("year");
  const std::size_t c_out = t.column("outcome");
  const std::size_t c_exp = t.column("exposure");
  StatePanel p;
  std::vector<std::size_t> extra_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c != c_state && c != c_year && c != c_out && c != c_exp) {
      extra_cols.push_back(c);
      p.extra_names.push_back(t.header[c]);
    }
  }
  p.extra.assign(extra_cols.size(), {});
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    PanelRow row;
    row.state_id = t.integer(r, c_state);
    row.year = static_cast<int>(t.integer(r, c_year));
    row.outcome = t.number(r, c_out);
    row.exposure = t.number(r, c_exp);
    if (!(row.exposure >= 0.0 && row.exposure <= 1.0)) {
      throw SchemaError(fmt::format("{}: row {}, column 'exposure': {} is outside [0, 1]", t.source,
                                    r + 1, row.exposure),
                        "exposure", r + 1);
    }
    p.rows.push_back(row);
    for (std::size_t e = 0; e < extra_cols.size(); ++e) p.extra[e].push_back(t.number(r, extra_cols[e]));
  }
  p.sort();
  try {
    p.validate_balanced();
  } catch (const ConfigError& e) {
    throw SchemaError(fmt::format("{}: {}", t.source, e.what()), "", 0);
  }
  return p;
}

CsvTable series_table(const TimeSeriesPanel& s) {
  CsvTable t;
  t.header.push_back("t");
  for (const auto& n : s.names) t.header.push_back(n);
  if (s.dummy) t.header.push_back("dummy");
  for (Eigen::Index i = 0; i < s.observations.rows(); ++i) {
    std::vector<std::string> f{fmt::format("{}", i)};
    for (Eigen::Index j = 0; j < s.observations.cols(); ++j) f.push_back(format_number(s.observations(i, j)));
    if (s.dummy) f.push_back(format_number((*s.dummy)(i)));
    t.rows.push_back(std::move(f));
  }
  return t;
}

CsvTable shocks_table(const TimeSeriesPanel& s) {
  CsvTable t;
  t.header.push_back("t");
  for (const auto& n : s.names) t.header.push_back("shock_" + n);
  for (Eigen::Index i = 0; i < s.shocks.rows(); ++i) {
    std::vector<std::string> f{fmt::format("{}", i)};
    for (Eigen::Index j = 0; j < s.shocks.cols(); ++j) f.push_back(format_number(s.shocks(i, j)));
    t.rows.push_back(std::move(f));
  }
  return t;
}

SeriesData series_from_table(const CsvTable& t, const std::string& dummy_column,
                             const std::vector<std::string>& variables) {
  SeriesData d;
  std::vector<std::size_t> cols;
  if (!variables.empty()) {
    for (const auto& v : variables) {
      cols.push_back(t.column(v));
      d.names.push_back(v);
    }
  } else {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (t.header[c] == "t" || t.header[c] == dummy_column) continue;
      cols.push_back(c);
      d.names.push_back(t.header[c]);
    }
  }
  if (cols.empty()) throw SchemaError(fmt::format("{}: no variable columns", t.source), "", 0);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  d.observations.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      d.observations(r, static_cast<Eigen::Index>(c)) = t.number(static_cast<std::size_t>(r), cols[c]);
    }
  }
  if (!dummy_column.empty() && t.has_column(dummy_column)) {
    const std::size_t dc = t.column(dummy_column);
    Vector v(n);
    for (Eigen::Index r = 0; r < n; ++r) v(r) = t.number(static_cast<std::size_t>(r), dc);
    d.dummy = v;
  }
  return d;
}

CsvTable supply_demand_table(const SupplyDemandSample& s) {
  CsvTable t;
  t.header = {"t"};
  for (const auto& n : SupplyDemandSample::column_names()) t.header.push_back(n);
  for (Eigen::Index i = 0; i < s.log_price.size(); ++i) {
    std::vector<std::string> f{fmt::format("{}", i)};
    for (const auto& n : SupplyDemandSample::column_names()) f.push_back(format_number(s.column(n)(i)));
    t.rows.push_back(std::move(f));
  }
  return t;
}

SupplyDemandSample supply_demand_from_table(const CsvTable& t) {
  SupplyDemandSample s;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  Vector* targets[] = {&s.log_price, &s.log_quantity, &s.tariff, &s.china_ip, &s.weather1, &s.weather2};
  const auto& names = SupplyDemandSample::column_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const std::size_t c = t.column(names[k]);
    targets[k]->resize(n);
    for (Eigen::Index r = 0; r < n; ++r) (*targets[k])(r) = t.number(static_cast<std::size_t>(r), c);
  }
  s.u_demand = Vector::Zero(n);
  s.u_supply = Vector::Zero(n);
  return s;
}

CsvTable path_table(const std::vector<SeasonRecord>& path) {
  CsvTable t;
  t.header = {"t",           "tau",           "expected_price", "realized_price", "acreage",
              "production",  "exports_china", "exports_row",    "domestic_use",   "inventory_end",
              "market_income", "subsidy_income", "floor_binding"};
  for (const auto& r : path) {
    t.rows.push_back({fmt::format("{}", r.t), format_number(r.tau), format_number(r.expected_price),
                      format_number(r.realized_price), format_number(r.acreage),
                      format_number(r.production), format_number(r.exports_china),
                      format_number(r.exports_row), format_number(r.domestic_use),
                      format_number(r.inventory_end), format_number(r.market_income),
                      format_number(r.subsidy_income), r.floor_binding ? "1" : "0"});
  }
  return t;
}

CsvTable equilibrium_table(const std::vector<EquilibriumSolution>& sols) {
  CsvTable t;
  t.header = {"tau",   "p_producer",   "p_china",          "q_us",
              "q_china", "q_row",      "total_supply",     "producer_revenue",
              "subsidy_payment", "price_change_frac"};
  for (const auto& s : sols) {
    t.rows.push_back({format_number(s.tau), format_number(s.p_producer), format_number(s.p_china),
                      format_number(s.q_us), format_number(s.q_china), format_number(s.q_row),
                      format_number(s.total_supply), format_number(s.producer_revenue),
                      format_number(s.subsidy_payment), format_number(s.price_change_frac)});
  }
  return t;
}

CsvTable two_exporter_table(const std::vector<TwoExporterSolution>& sols) {
  using S = TwoExporterSolution;
  CsvTable t;
  t.header = {"tau",          "regime",       "p_us",         "p_brazil",   "p_china_paid",
              "p_row_paid",   "us_to_china",  "us_to_row",    "brazil_to_china", "brazil_to_row",
              "diversion_share"};
  for (const auto& s : sols) {
    t.rows.push_back({format_number(s.tau), to_string(s.regime), format_number(s.p_us),
                      format_number(s.p_brazil), format_number(s.p_china_paid),
                      format_number(s.p_row_paid), format_number(s.flow[S::kUs][S::kChina]),
                      format_number(s.flow[S::kUs][S::kRow]),
                      format_number(s.flow[S::kBrazil][S::kChina]),
                      format_number(s.flow[S::kBrazil][S::kRow]), format_number(s.diversion_share)});
  }
  return t;
}

}  // namespace tariffkit::io
