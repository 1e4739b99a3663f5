#include "popproto/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include "popproto/errors.hpp"

namespace popproto {

Instrumentation parse_instrumentation(const std::string& name) {
  if (name == "off") return Instrumentation::Off;
  if (name == "light") return Instrumentation::Light;
  if (name == "full") return Instrumentation::Full;
  throw InvalidParameter("unknown instrumentation level '" + name + "'");
}

void ExperimentSpec::validate() const {
  if (seeds == 0) throw InvalidParameter("seeds must be at least 1");
  if (points.empty()) throw InvalidParameter("experiment needs at least one graph point");
  if (std::find(stack_names().begin(), stack_names().end(), stack) == stack_names().end())
    throw InvalidParameter("unknown stack '" + stack + "'");
}

RunRecord run_single(const GraphDescriptor& point, const std::string& stack,
                     const StackOptions& options, std::uint64_t seed, std::uint64_t step_cap,
                     std::optional<std::uint64_t> tail, std::vector<StepObserver*> observers) {
  const GraphDescriptor resolved = point.resolve(seed);
  const Graph g = build_graph(resolved);
  const ProtocolStack s = make_named_stack(stack, g, options);
  RunOptions ro;
  ro.step_cap = step_cap;
  ro.tail = tail;
  ro.observers = std::move(observers);
  RunRecord rec = run_until_stable(g, s, make_initial(g, s, options, seed), seed, ro);
  rec.graph = resolved;
  return rec;
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("POPPROTO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t total = spec.points.size() * spec.seeds;
  std::vector<RunRecord> out(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t point = i / spec.seeds;
      const std::uint64_t seed = spec.seed_base + i % spec.seeds;
      try {
        out[i] = run_single(spec.points[point], spec.stack, spec.stack_options, seed, spec.step_cap,
                            spec.tail);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  const std::size_t threads =
      std::min(total, spec.threads ? spec.threads : default_thread_count());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  // Slots are already indexed by (point, seed).
  return out;
}

nlohmann::ordered_json record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["graph"] = to_json(r.graph);
  j["stack"] = r.stack;
  j["seed"] = r.seed;
  auto steps = nlohmann::ordered_json::object();
  for (const auto& s : r.steps) {
    if (s.steps)
      steps[s.layer] = *s.steps;
    else
      steps[s.layer] = nullptr;
  }
  j["steps"] = steps;
  if (r.rounds)
    j["rounds"] = *r.rounds;
  else
    j["rounds"] = nullptr;
  j["capped"] = r.capped;
  j["output"] = r.output;
  return j;
}

RunRecord record_from_json(const nlohmann::ordered_json& j) {
  try {
    RunRecord r;
    r.graph = descriptor_from_json(nlohmann::json::parse(j.at("graph").dump()));
    r.stack = j.at("stack").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [layer, v] : j.at("steps").items())
      r.steps.push_back({layer, v.is_null() ? std::nullopt
                                            : std::optional<std::uint64_t>(v.get<std::uint64_t>())});
    if (!j.at("rounds").is_null()) r.rounds = j.at("rounds").get<std::uint64_t>();
    r.capped = j.at("capped").get<bool>();
    r.output = j.at("output");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("malformed run record: ") + e.what());
  }
}

bool same_record(const RunRecord& a, const RunRecord& b) {
  return record_to_json(a).dump() == record_to_json(b).dump();
}

void write_jsonl(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::vector<RunRecord> read_jsonl(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidParameter(std::string("malformed JSONL line: ") + e.what());
    }
    out.push_back(record_from_json(j));
  }
  return out;
}

}  // namespace popproto
