#include "screening/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace screening {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(Errc::parse_error, "line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, int line, const std::string& key) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') parse_fail(line, key + " expects a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& v, int line, const std::string& key) {
  const double x = to_double(v, line, key);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) parse_fail(line, key + " expects an integer, got '" + v + "'");
  return i;
}

// Comma-separated worker ids; an empty value is the empty set.
WorkerSet to_set(const std::string& v, int line, const std::string& key) {
  WorkerSet s;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const int id = to_int(item, line, key);
    if (id < 0 || id >= WorkerSet::kMaxWorkers) {
      parse_fail(line, key + " holds an out-of-range worker id '" + item + "'");
    }
    s = s.with(id);
  }
  return s;
}

SharingMatrix read_matrix_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "rho_matrix file '" + path + "' is not readable");
  std::vector<double> cells;
  double x = 0.0;
  while (in >> x) cells.push_back(x);
  if (!in.eof()) fail(Errc::parse_error, "rho_matrix file '" + path + "' has non-numeric content");
  if (static_cast<int>(cells.size()) != n * n) {
    fail(Errc::parse_error, "rho_matrix file '" + path + "' holds " +
                                std::to_string(cells.size()) + " values, expected " +
                                std::to_string(n * n));
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) rows[i][j] = cells[static_cast<std::size_t>(i) * n + j];
  }
  return SharingMatrix::from_rows(rows);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
  {
    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
      ++line;
      const std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const std::string s = trim(raw);
      if (s.empty()) continue;
      const std::size_t eq = s.find('=');
      if (eq == std::string::npos) parse_fail(line, "expected 'key = value', got '" + s + "'");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) parse_fail(line, "missing key before '='");
      if (kv.count(key)) parse_fail(line, "duplicate key '" + key + "'");
      kv[key] = {value, line};
    }
  }

  static const std::set<std::string> known = {
      "s_low",       "s_high",      "p",     "beta",        "delta", "d",
      "n_workers",   "rho",         "rho_matrix",           "partition_s",
      "partition_p", "q_reluctant", "game",  "y_set",       "ell",
      "alpha",       "c",           "mode",  "narrow_comparator"};
  for (const auto& [key, vl] : kv) {
    if (!known.count(key)) parse_fail(vl.second, "unknown key '" + key + "'");
  }

  auto has = [&](const std::string& k) { return kv.count(k) != 0; };
  auto val = [&](const std::string& k) { return kv.at(k).first; };
  auto line_of = [&](const std::string& k) { return kv.at(k).second; };
  auto num = [&](const std::string& k, double fallback) {
    return has(k) ? to_double(val(k), line_of(k), k) : fallback;
  };

  RunConfig rc;
  rc.params.s_low = num("s_low", rc.params.s_low);
  rc.params.s_high = num("s_high", rc.params.s_high);
  rc.params.p = num("p", rc.params.p);
  rc.params.beta = num("beta", rc.params.beta);
  rc.params.delta = num("delta", rc.params.delta);
  rc.params.d = num("d", rc.params.d);
  if (has("n_workers")) rc.params.n_workers = to_int(val("n_workers"), line_of("n_workers"), "n_workers");

  if (has("game")) {
    const std::string g = val("game");
    if (g == "simple") {
      rc.params.variant = Variant::Simple;
    } else if (g == "alternating") {
      rc.params.variant = Variant::AlternatingOffers;
    } else {
      parse_fail(line_of("game"), "game must be 'simple' or 'alternating', got '" + g + "'");
    }
  }
  rc.params.validate();
  const int n = rc.params.n_workers;

  if (has("rho") && has("rho_matrix")) {
    parse_fail(line_of("rho_matrix"), "rho and rho_matrix are mutually exclusive");
  }
  if (has("rho")) {
    rc.matrix = SharingMatrix::symmetric(n, to_double(val("rho"), line_of("rho"), "rho"));
  } else if (has("rho_matrix")) {
    rc.matrix = read_matrix_file(val("rho_matrix"), n);
  } else {
    fail(Errc::parse_error, "one of rho or rho_matrix is required");
  }
  rc.matrix.validate();

  const WorkerSet everyone = WorkerSet::all(n);
  rc.partition.reluctant = has("partition_p")
                               ? to_set(val("partition_p"), line_of("partition_p"), "partition_p")
                               : WorkerSet{};
  rc.partition.screeners = has("partition_s")
                               ? to_set(val("partition_s"), line_of("partition_s"), "partition_s")
                               : everyone - rc.partition.reluctant;
  rc.partition.q_reluctant = num("q_reluctant", 0.5 * (1.0 + rc.params.p));
  rc.partition.validate(rc.params);

  const bool disc = has("y_set") || has("ell") || has("alpha") || has("c") || has("mode") ||
                    has("narrow_comparator");
  if (disc) {
    DiscriminationConfig dc;
    dc.protected_set = has("y_set") ? to_set(val("y_set"), line_of("y_set"), "y_set") : WorkerSet{};
    dc.ell = num("ell", 0.0);
    dc.alpha = num("alpha", 0.0);
    dc.c = num("c", 0.0);
    if (has("mode")) {
      const std::string mo = val("mode");
      if (mo == "perception") {
        dc.mode = DiscMode::Perception;
      } else if (mo == "taste") {
        dc.mode = DiscMode::TasteBased;
      } else if (mo == "statistical") {
        dc.mode = DiscMode::Statistical;
      } else {
        parse_fail(line_of("mode"),
                   "mode must be 'perception', 'taste', or 'statistical', got '" + mo + "'");
      }
    }
    if (has("narrow_comparator")) {
      const std::string nc = val("narrow_comparator");
      if (nc == "0" || nc == "false") {
        dc.narrow_comparator = false;
      } else if (nc == "1" || nc == "true") {
        dc.narrow_comparator = true;
      } else {
        parse_fail(line_of("narrow_comparator"), "narrow_comparator must be a boolean");
      }
    }
    dc.validate(rc.params);
    rc.discrimination = dc;
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "config file '" + path + "' is not readable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace screening
