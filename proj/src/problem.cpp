#include "qsturm/problem.hpp"

#include "qsturm/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace qsturm {

namespace {

constexpr std::array<std::string_view, 13> kSettings{
    "b_min",         "b_max",  "scan_points",        "profile_grid", "rtol", "atol", "hyperbolicity_margin",
    "tangency_threshold", "blowup_bound", "sim_grid", "t_end", "epsilon", "random_samples"};

constexpr std::array<std::string_view, 12> kReserved{"x",   "u",   "p",  "pi",   "sin", "cos",
                                                     "tan", "exp", "ln", "tanh", "abs", "sqrt"};

bool contains(auto const& table, std::string_view key) {
  for (auto k : table)
    if (k == key) return true;
  return false;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg, std::size_t column) {
  throw SyntaxError(name + ":" + std::to_string(line) + ": " + msg, column);
}

double number(const std::string& name, const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    fail(name, e.line, "value of '" + key + "' is not a finite number", 1);
  return v;
}

int integer(const std::string& name, const std::string& key, const Entry& e) {
  int v = 0;
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc{} || ptr != end) fail(name, e.line, "value of '" + key + "' is not an integer", 1);
  return v;
}

}  // namespace

ProblemFile parse_problem(std::string_view text, const std::string& name) {
  std::map<std::string, Entry, std::less<>> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // strip a comment outside quotes
    char quote = 0;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const char c = raw[i];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '#') {
        cut = i;
        break;
      }
    }
    if (quote) fail(name, line, "unterminated quote", raw.size());
    const std::string_view body = trim(std::string_view(raw).substr(0, cut));
    if (body.empty()) continue;

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail(name, line, "expected 'key = value'", 1);
    const std::string key(trim(body.substr(0, eq)));
    std::string_view value = trim(body.substr(eq + 1));
    if (!is_identifier(key)) fail(name, line, "invalid key '" + key + "'", 1);
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    else if (!value.empty() && (value.front() == '"' || value.front() == '\''))
      fail(name, line, "text after closing quote", eq + 2);
    if (trim(value).empty()) fail(name, line, "empty value for '" + key + "'", eq + 2);
    if (entries.contains(key)) fail(name, line, "duplicate key '" + key + "'", 1);
    entries.emplace(key, Entry{std::string(trim(value)), line});
  }

  ProblemFile out;
  for (const auto& [key, e] : entries) {
    out.entries.emplace(key, e.value);
    if (key == "a" || key == "f" || contains(kSettings, key)) continue;
    if (contains(kReserved, key)) fail(name, e.line, "'" + key + "' is reserved", 1);
    out.parameters.emplace(key, number(name, key, e));
  }

  auto expression = [&](const std::string& key) {
    const Entry& e = entries.at(key);
    try {
      return parse(e.value, out.parameters);
    } catch (const SyntaxError& err) {
      std::string what = err.what();
      what.resize(std::min(what.size(), what.rfind(" at position ")));
      fail(name, e.line, "in '" + key + "': " + what, err.position());
    } catch (const Error& err) {
      throw SyntaxError(name + ":" + std::to_string(e.line) + ": in '" + key + "': " + err.what(), 0);
    }
  };
  if (!entries.contains("f")) throw ValidationError(name + ": missing required key 'f'");
  out.spec.f = expression("f");
  if (entries.contains("a")) out.spec.a = expression("a");

  const bool has_min = entries.contains("b_min"), has_max = entries.contains("b_max");
  if (has_min != has_max) throw ValidationError(name + ": b_min and b_max must be given together");
  if (has_min)
    out.spec.window = ScanWindow{number(name, "b_min", entries.at("b_min")), number(name, "b_max", entries.at("b_max"))};

  auto setting = [&](std::string_view key, auto& target) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    using T = std::remove_reference_t<decltype(target)>;
    if constexpr (std::is_floating_point_v<T>) {
      target = number(name, it->first, it->second);
    } else {
      const int v = integer(name, it->first, it->second);
      if (v < 0) throw ValidationError(name + ": '" + it->first + "' must be nonnegative");
      target = static_cast<T>(v);
    }
  };
  setting("scan_points", out.spec.scan_points);
  setting("profile_grid", out.spec.profile_grid);
  setting("rtol", out.spec.rtol);
  setting("atol", out.spec.atol);
  setting("hyperbolicity_margin", out.spec.hyperbolicity_margin);
  setting("tangency_threshold", out.spec.tangency_threshold);
  setting("blowup_bound", out.spec.blowup_bound);
  setting("sim_grid", out.verify.grid);
  setting("t_end", out.verify.t_end);
  setting("epsilon", out.verify.epsilon);
  setting("random_samples", out.verify.random_samples);

  out.spec.validate();
  if (out.verify.grid < 101) throw ValidationError(name + ": sim_grid must be at least 101");
  if (!(out.verify.t_end > 0) || !(out.verify.epsilon > 0))
    throw ValidationError(name + ": t_end and epsilon must be positive");
  return out;
}

ProblemFile read_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open problem file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read problem file " + path.string());
  return parse_problem(text.str(), path.string());
}

ProblemSpec load_problem(const std::filesystem::path& path) { return read_problem_file(path).spec; }

std::string describe(const ProblemFile& problem) {
  auto num = [](double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  const ProblemSpec& s = problem.spec;
  std::string out = "a = " + to_string(s.a) + "\nf = " + to_string(s.f) + "\n";
  for (const auto& [k, v] : problem.parameters) out += k + " = " + num(v) + "\n";
  if (s.window) out += "window = [" + num(s.window->b_min) + ", " + num(s.window->b_max) + "]\n";
  out += "scan_points = " + std::to_string(s.scan_points) + "\nprofile_grid = " + std::to_string(s.profile_grid) +
         "\nrtol = " + num(s.rtol) + "\natol = " + num(s.atol) + "\nhyperbolicity_margin = " +
         num(s.hyperbolicity_margin) + "\nsim_grid = " + std::to_string(problem.verify.grid) +
         "\nt_end = " + num(problem.verify.t_end) + "\nepsilon = " + num(problem.verify.epsilon) +
         "\nrandom_samples = " + std::to_string(problem.verify.random_samples) + "\n";
  return out;
}

}  // namespace qsturm
