#include <algorithm>
#include <atomic>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <thread>

#include "ttpark/harness.hpp"

namespace ttpark {

namespace {

struct Job {
  std::size_t file;
  int spot;
};

BatchRow row_from(const std::string& name, const SimResult& r) {
  BatchRow row;
  row.scenario = name;
  row.spot = r.spot_id;
  row.success = r.success;
  row.collision = r.collision;
  row.jackknife = r.jackknife;
  row.final_pos_err = r.final_pos_err;
  row.final_heading_err = r.final_heading_err;
  row.max_abs_hitch = r.max_abs_hitch;
  row.path_length = r.path_length;
  row.planning_time_s = r.planning_time;
  row.sim_time_s = r.sim_time;
  return row;
}

}  // namespace

BatchReport run_batch(const std::filesystem::path& dir, const BatchOptions& opts) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  if (files.empty()) throw std::runtime_error("no scenarios found");
  std::ranges::sort(files, [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

  BatchReport report;
  report.wall_times = opts.wall_times;

  // Load sequentially; parse failures become rows in their filename slot.
  std::vector<std::optional<Scenario>> scenarios(files.size());
  std::vector<std::vector<BatchRow>> per_file(files.size());
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      scenarios[i] = load_scenario_file(files[i].string());
      for (int id : free_spot_ids(*scenarios[i])) jobs.push_back({i, id});
    } catch (const std::exception& e) {
      BatchRow row;
      row.scenario = files[i].filename().string();
      row.error = e.what();
      per_file[i].push_back(row);
    }
  }

  std::vector<BatchRow> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      const SimResult r = run(*scenarios[job.file], job.spot, opts.run);
      results[j] = row_from(files[job.file].filename().string(), r);
    }
  };
  const int threads = std::clamp(opts.parallel, 1, std::max(1, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t j = 0; j < jobs.size(); ++j) per_file[jobs[j].file].push_back(results[j]);
  for (auto& rows : per_file) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  return report;
}

std::string BatchReport::csv() const {
  std::string out =
      "scenario,spot,success,collision,jackknife,final_pos_err,final_heading_err,max_abs_hitch,path_length,"
      "planning_time_s,sim_time_s\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,", r.scenario.c_str(), r.spot,
                  r.success ? 1 : 0, r.collision ? 1 : 0, r.jackknife ? 1 : 0, r.final_pos_err,
                  r.final_heading_err, r.max_abs_hitch, r.path_length);
    out += buf;
    if (wall_times && r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.planning_time_s, r.sim_time_s);
      out += buf;
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

double BatchReport::success_rate() const {
  if (rows.empty()) return 0.0;
  const auto ok = std::ranges::count_if(rows, [](const BatchRow& r) { return r.success; });
  return static_cast<double>(ok) / static_cast<double>(rows.size());
}

std::string BatchReport::summary() const {
  double err_sum = 0.0;
  std::size_t err_n = 0;
  double max_plan = 0.0;
  std::size_t load_failures = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++load_failures;
      continue;
    }
    err_sum += r.final_pos_err;
    ++err_n;
    max_plan = std::max(max_plan, r.planning_time_s);
  }
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "runs: %zu\nload_failures: %zu\nsuccess_rate: %.6f\nmean_final_pos_err: %.6f\n",
                rows.size(), load_failures, success_rate(), err_n ? err_sum / static_cast<double>(err_n) : 0.0);
  out += buf;
  if (wall_times) {
    std::snprintf(buf, sizeof buf, "max_planning_time_s: %.6f\n", max_plan);
    out += buf;
  } else {
    out += "max_planning_time_s: not recorded (use --wall-times)\n";
  }
  return out;
}

}  // namespace ttpark
