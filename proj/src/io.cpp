#include "fhn/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fhn/errors.hpp"
#include "json.hpp"

namespace fhn {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines(std::string_view text) {
  auto out = split(text, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

void append(std::string& out, double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, end);
}

}  // namespace

const char* const kTrajectoryHeader =
    "t,y1,y2,y3,y4,yref1,yref2,yref3,yref4,e_norm,funnel_radius,ise1,ise2,ise3,ise4,v_l2,"
    "u_l2,margin";

std::string format_double(double x) {
  std::string s;
  append(s, x);
  return s;
}

double parse_double(std::string_view s) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') throw FormatError("not a number: '" + std::string(s) + "'");
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (s.empty() || ec != std::errc{} || ptr != last || std::isnan(x)) {
    throw FormatError("not a number: '" + std::string(s) + "'");
  }
  return x;
}

std::string trajectory_to_csv(const TrajectoryLog& log) {
  if (log.outputs != 4) throw DomainError("trajectory CSV carries exactly four outputs");
  log.validate();
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const auto& s : log.samples) {
    auto put = [&out](double x) {
      append(out, x);
      out += ',';
    };
    put(s.t);
    for (double v : s.y) put(v);
    for (double v : s.y_ref) put(v);
    put(s.e_norm);
    put(s.funnel_radius);
    for (double v : s.i_se) put(v);
    put(s.v_l2);
    put(s.u_l2);
    append(out, s.margin);
    out += '\n';
  }
  return out;
}

TrajectoryLog trajectory_from_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty() || rows.front() != kTrajectoryHeader) {
    throw FormatError("trajectory: malformed header, expected '" + std::string(kTrajectoryHeader) + "'");
  }
  TrajectoryLog log;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cells = split(rows[r], ',');
    if (cells.size() != 18) {
      throw FormatError("trajectory: line " + std::to_string(r + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected 18");
    }
    double v[18];
    for (std::size_t c = 0; c < 18; ++c) {
      try {
        v[c] = parse_double(cells[c]);
      } catch (const FormatError& e) {
        throw FormatError("trajectory: line " + std::to_string(r + 1) + ", column " +
                          std::to_string(c + 1) + ": " + e.what());
      }
    }
    Sample s;
    s.t = v[0];
    s.y.assign(v + 1, v + 5);
    s.y_ref.assign(v + 5, v + 9);
    s.e_norm = v[9];
    s.funnel_radius = v[10];
    s.i_se.assign(v + 11, v + 15);
    s.v_l2 = v[15];
    s.u_l2 = v[16];
    s.margin = v[17];
    if (!log.samples.empty() && !(s.t > log.samples.back().t)) {
      throw FormatError("trajectory: line " + std::to_string(r + 1) + ": times not increasing");
    }
    log.samples.push_back(std::move(s));
  }
  return log;
}

void write_trajectory(const TrajectoryLog& log, const std::string& path) {
  write_file_atomic(path, trajectory_to_csv(log));
}

TrajectoryLog read_trajectory(const std::string& path) {
  return trajectory_from_csv(read_file(path));
}

std::string snapshot_to_text(const Snapshot& s) {
  const std::size_t n = static_cast<std::size_t>(s.nx + 1) * static_cast<std::size_t>(s.ny + 1);
  if (s.nx < 1 || s.ny < 1 || s.v.size() != n || s.u.size() != n) {
    throw DomainError("snapshot: state size does not match the mesh");
  }
  std::string out = std::to_string(s.nx) + " " + std::to_string(s.ny) + " ";
  append(out, s.t);
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    append(out, s.v[i]);
    out += ' ';
    append(out, s.u[i]);
    out += '\n';
  }
  return out;
}

Snapshot snapshot_from_text(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty()) throw FormatError("snapshot: empty file");
  const auto head = split(rows[0], ' ');
  if (head.size() != 3) throw FormatError("snapshot: header must be 'nx ny t'");
  Snapshot s;
  auto parse_int = [](std::string_view c) {
    int v = 0;
    auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
    if (c.empty() || ec != std::errc{} || p != c.data() + c.size() || v < 1) {
      throw FormatError("snapshot: bad mesh size '" + std::string(c) + "'");
    }
    return v;
  };
  s.nx = parse_int(head[0]);
  s.ny = parse_int(head[1]);
  s.t = parse_double(head[2]);
  const std::size_t n = static_cast<std::size_t>(s.nx + 1) * static_cast<std::size_t>(s.ny + 1);
  if (rows.size() - 1 != n) {
    throw FormatError("snapshot: expected " + std::to_string(n) + " node lines, found " +
                      std::to_string(rows.size() - 1));
  }
  s.v.resize(n);
  s.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split(rows[i + 1], ' ');
    if (cells.size() != 2) {
      throw FormatError("snapshot: line " + std::to_string(i + 2) + " must hold 'v u'");
    }
    s.v[i] = parse_double(cells[0]);
    s.u[i] = parse_double(cells[1]);
  }
  return s;
}

void write_snapshot(const Snapshot& s, const std::string& path) {
  write_file_atomic(path, snapshot_to_text(s));
}

Snapshot read_snapshot(const std::string& path) { return snapshot_from_text(read_file(path)); }

std::string reports_to_json(const std::vector<VerificationReport>& reports) {
  using nlohmann::ordered_json;
  auto number = [](double x) -> ordered_json {
    if (std::isfinite(x)) return x;
    return format_double(x);
  };
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json m = ordered_json::object();
    for (const auto& [k, v] : r.measured) m[k] = number(v);
    ordered_json times = ordered_json::array();
    for (double t : r.offending_times) times.push_back(number(t));
    arr.push_back({{"check", r.name},
                   {"pass", r.pass},
                   {"gating", r.gating},
                   {"measured", m},
                   {"tolerance", number(r.tolerance)},
                   {"provenance", r.provenance},
                   {"detail", r.detail},
                   {"offending_times", times}});
  }
  ordered_json doc = {{"pass", all_gating_pass(reports)}, {"reports", arr}};
  return doc.dump(2) + "\n";
}

std::string reports_to_text(const std::vector<VerificationReport>& reports) {
  std::ostringstream o;
  o.precision(6);
  for (const auto& r : reports) {
    o << (r.pass ? "PASS" : "FAIL") << (r.gating ? "" : " (informational)") << "  " << r.name;
    for (const auto& [k, v] : r.measured) o << "  " << k << "=" << v;
    if (r.tolerance != 0.0) o << "  tolerance=" << r.tolerance;
    if (!r.offending_times.empty()) {
      o << "  offending_t=";
      for (std::size_t i = 0; i < r.offending_times.size() && i < 5; ++i) {
        o << (i ? "," : "") << r.offending_times[i];
      }
      if (r.offending_times.size() > 5) o << ",...";
    }
    if (!r.detail.empty()) o << "  (" << r.detail << ")";
    o << "\n";
  }
  return o.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open '" + tmp + "' for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw FormatError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace fhn
