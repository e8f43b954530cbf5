#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <iostream>
#include <sstream>
#include <thread>

#include "qik/io.hpp"

namespace qik::cli {

using io::json;

namespace {

struct ItemResult {
  int code = kOk;
  json value;
};

// Runs fn(i) for i < count on at most `jobs` threads; results keep input order.
std::vector<ItemResult> parallelMap(size_t count, int jobs, const std::function<ItemResult(size_t)>& fn) {
  std::vector<ItemResult> out(count);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < count;) out[i] = fn(i);
  };
  const size_t threads = std::min<size_t>(std::max(jobs, 1), std::max<size_t>(count, 1));
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// Per-item isolation: every exception becomes an error record with its code.
ItemResult guarded(size_t index, const std::function<ItemResult()>& fn) {
  auto fail = [&](int code, const char* kind, const std::string& what) {
    spdlog::warn("item {}: {}: {}", index, kind, what);
    return ItemResult{code, {{"error", {{"kind", kind}, {"message", what}}}}};
  };
  try {
    return fn();
  } catch (const InputError& e) {
    return fail(kInputError, "input", e.what());
  } catch (const json::exception& e) {
    return fail(kInputError, "input", e.what());
  } catch (const PreconditionError& e) {
    return fail(kPrecondition, "precondition", e.what());
  } catch (const NumericalError& e) {
    return fail(kInconclusive, "numerical", e.what());
  }
}

json parseInput(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

std::vector<json> items(const json& doc) {
  if (doc.is_array()) return {doc.begin(), doc.end()};
  return {doc};
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::string compact(const json& j) { return j.is_null() ? "" : j.dump(); }

CommandResult collect(const std::vector<ItemResult>& results, bool array, const RunConfig& cfg,
                      const std::function<std::string(size_t, const ItemResult&)>& csvRow, const std::string& header) {
  CommandResult out;
  for (auto& r : results) out.code = std::max(out.code, r.code);
  if (cfg.format == "csv") {
    out.output = header + "\n";
    for (size_t i = 0; i < results.size(); ++i) out.output += csvRow(i, results[i]) + "\n";
  } else {
    json doc = json::array();
    for (auto& r : results) doc.push_back(r.value);
    out.output = io::dump(array ? doc : doc[0]);
  }
  return out;
}

std::string errorText(const ItemResult& r) {
  return r.value.contains("error") ? r.value["error"]["message"].get<std::string>() : "";
}

}  // namespace

CommandResult cmdClassify(const RunConfig& cfg, const std::string& text) {
  const json doc = parseInput(text);
  const auto list = items(doc);
  const double tol = cfg.tol.value_or(1e-7);
  auto results = parallelMap(list.size(), cfg.jobs, [&](size_t i) {
    return guarded(i, [&] {
      const Quiver q = io::quiverFromJson(list[i]);
      const Classification c = classify(q, tol, cfg.seed);
      ItemResult r;
      r.value = {{"label", io::toJson(c.label)},
                 {"description", describe(c.label)},
                 {"diagnostics", io::toJson(c.diagnostics)}};
      if (cfg.samples > 0) {
        const Stability s = isHKStable(q, tol, cfg.samples, cfg.seed);
        r.value["stability"] = verdictName(s);
        if (s == Stability::inconclusive) r.code = kInconclusive;
      }
      spdlog::info("item {}: {}", i, describe(c.label));
      return r;
    });
  });
  return collect(results, doc.is_array(), cfg,
                 [](size_t i, const ItemResult& r) {
                   const json& l = r.value.contains("label") ? r.value["label"] : json();
                   auto part = [&](const char* k) { return l.is_null() ? std::string() : csvField(compact(l[k])); };
                   const json& d = r.value.contains("diagnostics") ? r.value["diagnostics"] : json();
                   return std::to_string(i) + "," + std::to_string(r.code) + "," + part("sim") + "," + part("orbit") +
                          "," + part("S") + "," + part("delta") + "," + part("m") + "," +
                          (l.is_null() ? "" : std::to_string(l["ell"].get<int>())) + "," +
                          (d.is_null() ? "" : csvField(compact(d["margin"]))) + "," +
                          (r.value.contains("stability") ? r.value["stability"].get<std::string>() : "") + "," +
                          csvField(errorText(r));
                 },
                 "index,code,sim,orbit,S,delta,m,ell,margin,stability,error");
}

CommandResult cmdSolve(const RunConfig& cfg, const std::string& text) {
  const json doc = parseInput(text);
  const auto list = items(doc);
  const double tol = cfg.tol.value_or(1e-10);
  auto results = parallelMap(list.size(), cfg.jobs, [&](size_t i) {
    return guarded(i, [&] {
      const Quiver q = io::quiverFromJson(list[i]);
      std::optional<std::vector<double>> target;
      if (list[i].contains("lambdaR")) {
        target = list[i]["lambdaR"].get<std::vector<double>>();
        if (int(target->size()) != q.levels() - 1) throw InputError("lambdaR needs one value per non-top level");
      }
      const FlowResult f = kempfNessFlow(q, target, tol, cfg.maxIter);
      ItemResult r;
      r.value = {{"quiver", io::toJson(f.quiver)}, {"report", io::toJson(f.report)}};
      // A small residual alone proves nothing: on a non-closed orbit the flow
      // reaches the boundary while the group element escapes. Without a
      // target the closedness test runs on every item.
      if (!target || f.report.verdict != FlowVerdict::converged) {
        const OrbitReport o = orbitClosed(q, tol, cfg.maxIter);
        r.value["orbit"] = {{"verdict", verdictName(o.verdict)}, {"logNormPerDecade", o.logNormPerDecade}};
        if (o.verdict != OrbitVerdict::closed) r.code = kInconclusive;
      }
      if (f.report.verdict != FlowVerdict::converged) r.code = kInconclusive;
      spdlog::info("item {}: {} after {} iterations", i, verdictName(f.report.verdict), f.report.iterations);
      return r;
    });
  });
  return collect(results, doc.is_array(), cfg,
                 [](size_t i, const ItemResult& r) {
                   std::string row = std::to_string(i) + "," + std::to_string(r.code) + ",";
                   if (r.value.contains("report")) {
                     const json& p = r.value["report"];
                     row += p["verdict"].get<std::string>() + "," + std::to_string(p["iterations"].get<int>()) + "," +
                            num(p["finalResidual"]) + "," + num(p["groupNorm"]) + "," + num(p["maxComplexResidual"]);
                   } else {
                     row += ",,,,";
                   }
                   row += ",";
                   if (r.value.contains("orbit")) row += r.value["orbit"]["verdict"].get<std::string>();
                   return row + "," + csvField(errorText(r));
                 },
                 "index,code,verdict,iterations,finalResidual,groupNorm,maxComplexResidual,orbit,error");
}

namespace {

NahmSolution thinned(const NahmSolution& s, int stride) {
  NahmSolution out = s;
  out.grid.clear();
  out.values.clear();
  const size_t k = size_t(std::max(stride, 1));
  for (size_t m = 0; m < s.grid.size(); ++m)
    if (m % k == 0 || m + 1 == s.grid.size()) {
      out.grid.push_back(s.grid[m]);
      out.values.push_back(s.values[m]);
    }
  return out;
}

struct Series {
  std::string name;
  std::vector<double> x, y;
};

// Static SVG line plot. Non-positive values are dropped on log axes.
void writePlot(const std::filesystem::path& path, const std::string& title, const std::vector<Series>& series,
               bool logAxes) {
  const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 40;
  auto tr = [&](double v) { return logAxes ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (auto& s : series)
    for (size_t m = 0; m < s.x.size(); ++m) {
      if (logAxes && (s.x[m] <= 0 || s.y[m] <= 0)) continue;
      x0 = std::min(x0, tr(s.x[m])), x1 = std::max(x1, tr(s.x[m]));
      y0 = std::min(y0, tr(s.y[m])), y1 = std::max(y1, tr(s.y[m]));
    }
  if (!(x1 > x0)) x0 = 0, x1 = 1;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (tr(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (tr(v) - y0) / (y1 - y0) * (H - T - B); };
  static const char* colours[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93"};

  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path.string());
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n"
    << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const char* fmt = logAxes ? "1e%.1f" : "%.3g";
  char buf[32];
  for (auto [v, x, y, anchor] : {std::tuple{x0, L, H - B + 15, "start"}, std::tuple{x1, W - R, H - B + 15, "end"}}) {
    std::snprintf(buf, sizeof buf, fmt, v);
    f << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\" text-anchor=\"" << anchor << "\">" << buf
      << "</text>\n";
  }
  for (auto [v, y] : {std::pair{y0, H - B}, std::pair{y1, T + 10}}) {
    std::snprintf(buf, sizeof buf, fmt, v);
    f << "<text x=\"" << L - 5 << "\" y=\"" << y << "\" font-size=\"11\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  for (size_t s = 0; s < series.size(); ++s) {
    const char* colour = colours[s % std::size(colours)];
    f << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (size_t m = 0; m < series[s].x.size(); ++m) {
      if (logAxes && (series[s].x[m] <= 0 || series[s].y[m] <= 0)) continue;
      f << px(series[s].x[m]) << "," << py(series[s].y[m]) << " ";
    }
    f << "\"/>\n<text x=\"" << W - R - 60 << "\" y=\"" << T + 15 + 14 * s << "\" font-size=\"11\" fill=\"" << colour
      << "\">" << series[s].name << "</text>\n";
  }
  f << "</svg>\n";
}

}  // namespace

CommandResult cmdNahm(const RunConfig& cfg, const std::string& text) {
  const json doc = parseInput(text);
  const NahmQuad init = io::quadFromJson(doc.at("init"));
  if (doc.contains("n") && doc["n"].get<int>() != init[0].rows()) throw InputError("n does not match the matrices");
  if (!(cfg.step > 0) || !(cfg.tmax > 0)) throw InputError("step and tmax must be positive");

  const NahmSolution sol = integrate(init, {}, 0, cfg.tmax, cfg.step);
  spdlog::info("integrated {} samples to t = {}", sol.grid.size(), sol.grid.back());
  CommandResult out;
  json o = {{"residual", nahmResidual(sol)}};
  std::optional<BielawskiResult> norm;

  if (sol.truncated) {
    spdlog::warn("integration truncated: {}", sol.diagnostic);
    out.code = kInconclusive;
  } else {
    const AsymptoticData fit = fitAsymptotics(sol);
    o["fit"] = io::toJson(fit);
    o["centralizerDimension"] = commonCentralizer({fit.tau[0], fit.tau[1], fit.tau[2]}, 1e-6).dimension;
    if (doc.contains("direction")) {
      const NahmQuad dir = io::quadFromJson(doc["direction"]);
      const double h = 1e-5;
      NahmQuad up = init, down = init;
      for (int i = 0; i < 4; ++i) up[i] += h * dir[i], down[i] -= h * dir[i];
      const NahmSolution plus = integrate(up, {}, 0, cfg.tmax, cfg.step);
      const NahmSolution minus = integrate(down, {}, 0, cfg.tmax, cfg.step);
      if (plus.truncated || minus.truncated) {
        spdlog::warn("perturbed integration truncated");
        out.code = kInconclusive;
      } else {
        NahmSolution tangent = sol;
        for (size_t m = 0; m < sol.grid.size(); ++m)
          for (int i = 0; i < 4; ++i) tangent.values[m][i] = (plus.values[m][i] - minus.values[m][i]) / (2 * h);
        norm = bielawskiNorm(sol, tangent, cfg.c);
        o["bielawski"] = io::toJson(*norm);
      }
    }
  }
  o["solution"] = io::toJson(thinned(sol, cfg.stride));

  if (!cfg.plotDir.empty()) {
    std::filesystem::create_directories(cfg.plotDir);
    std::vector<Series> traces(4);
    for (int i = 0; i < 4; ++i) {
      traces[i].name = "|T" + std::to_string(i) + "|";
      for (size_t m = 0; m < sol.grid.size(); ++m) {
        traces[i].x.push_back(sol.grid[m]);
        traces[i].y.push_back(sol.values[m][i].norm());
      }
    }
    writePlot(std::filesystem::path(cfg.plotDir) / "norms.svg", "|T_i(t)|", traces, false);
    if (norm) {
      Series tail{"integrand", {}, {}};
      for (size_t m = sol.grid.size() / 2; m < sol.grid.size(); ++m) {
        tail.x.push_back(sol.grid[m]);
        tail.y.push_back(std::abs(norm->integrand[m]));
      }
      writePlot(std::filesystem::path(cfg.plotDir) / "integrand_tail.svg", "Bielawski integrand tail (log-log)",
                {tail}, true);
    }
  }

  if (cfg.format == "csv") {
    out.output = "t,T0,T1,T2,T3\n";
    const NahmSolution thin = thinned(sol, cfg.stride);
    for (size_t m = 0; m < thin.grid.size(); ++m) {
      out.output += num(thin.grid[m]);
      for (int i = 0; i < 4; ++i) out.output += "," + num(thin.values[m][i].norm());
      out.output += "\n";
    }
  } else {
    out.output = io::dump(o);
  }
  return out;
}

void setLogLevel(const std::string& level) { spdlog::set_level(spdlog::level::from_str(level)); }

int run(const RunConfig& cfg) {
  std::string text;
  CommandResult r;
  try {
    if (cfg.format != "json" && cfg.format != "csv") throw InputError("format must be json or csv");
    if (cfg.tol && !(*cfg.tol > 0)) throw InputError("tol must be positive");
    if (cfg.input == "-") {
      text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
      std::ifstream f(cfg.input);
      if (!f) throw InputError("cannot read " + cfg.input);
      text.assign(std::istreambuf_iterator<char>(f), {});
    }
    if (cfg.command == "classify") r = cmdClassify(cfg, text);
    else if (cfg.command == "solve") r = cmdSolve(cfg, text);
    else if (cfg.command == "nahm") r = cmdNahm(cfg, text);
    else throw InputError("unknown command " + cfg.command);
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const json::exception& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kPrecondition;
  } catch (const NumericalError& e) {
    spdlog::error("{}", e.what());
    return kInconclusive;
  }
  if (cfg.output == "-") {
    std::cout << r.output;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) {
      spdlog::error("cannot write {}", cfg.output);
      return kInputError;
    }
    f << r.output;
  }
  return r.code;
}

}  // namespace qik::cli
