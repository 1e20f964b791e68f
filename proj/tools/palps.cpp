#include "palps/analysis.hpp"
#include "palps/codegen.hpp"
#include "palps/gc_interp.hpp"
#include "palps/parser.hpp"
#include "palps/semantics.hpp"
#include "palps/statespace.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

enum Exit { kOk = 0, kDomain = 1, kUsage = 2, kLimits = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("cannot write " + path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  return f;
}

// Parses and validates; prints findings to stderr. Returns nullopt on errors.
std::optional<palps::Model> load(const std::string& path, bool quiet_warnings = false) {
  const std::string text = read_file(path);
  try {
    palps::Model m = palps::parse_model(text);
    auto rep = palps::validate_model(m);
    if (!quiet_warnings)
      for (const auto& w : rep.warnings()) std::cerr << path << ": warning: " << w << "\n";
    for (const auto& e : rep.errors()) std::cerr << path << ": error: " << e << "\n";
    if (!rep.ok()) return std::nullopt;
    return m;
  } catch (const palps::SyntaxError& e) {
    for (const auto& d : e.diagnostics)
      std::cerr << path << ":" << d.span.line << ":" << d.span.column << ": error: " << d.message << "\n";
    return std::nullopt;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Common {
  std::string model;
  std::string policy = "on";
  std::size_t max_states = 1000000;
  int threads = palps::default_threads();
  bool unbounded = false;

  palps::SemanticsOptions semantics() const { return palps::SemanticsOptions{unbounded}; }
};

void add_model(CLI::App* c, Common& o) { c->add_option("model", o.model, "model file (.palps)")->required(); }
void add_policy(CLI::App* c, Common& o) {
  c->add_option("--policy", o.policy, "apply the model's policy")->check(CLI::IsMember({"on", "off"}));
  c->add_flag("--unbounded-replication", o.unbounded, "ignore replication bounds");
}
void add_limits(CLI::App* c, Common& o) {
  c->add_option("--max-states", o.max_states, "state limit");
  c->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

int cmd_parse(const Common& o) {
  auto m = load(o.model);
  if (!m) return kDomain;
  std::cout << "ok: " << m->species.size() << " species, " << m->habitat.size() << " locations, "
            << m->policy.pairs().size() << " policy pairs\n";
  return kOk;
}

int cmd_explore(const Common& o, const std::string& dump) {
  auto m = load(o.model);
  if (!m) return kDomain;
  palps::Semantics sem(*m, o.semantics());
  palps::ExploreLimits lim{o.max_states, o.policy == "on", o.threads};
  auto t0 = std::chrono::steady_clock::now();
  auto mdp = palps::build_mdp(sem, lim);
  const double secs = seconds_since(t0);
  auto st = palps::mdp_stats(mdp);
  std::cout << "policy: " << o.policy << "\nstates: " << st.states << "\nchoices: " << st.choices
            << "\ntransitions: " << st.transitions << "\ndeadlocks: " << st.deadlocks
            << "\ntruncated: " << (st.truncated ? "yes" : "no") << "\ntime_s: " << std::fixed << std::setprecision(3)
            << secs << "\n";
  if (!dump.empty()) write_file(dump, palps::mdp_to_json(*m, mdp));
  if (st.truncated) {
    std::cerr << "warning: state limit " << o.max_states << " reached, results are partial\n";
    return kLimits;
  }
  return kOk;
}

int cmd_check(const Common& o, const std::vector<std::string>& queries) {
  auto m = load(o.model, true);
  if (!m) return kDomain;
  std::vector<palps::Query> parsed;
  for (const auto& q : queries) parsed.push_back(palps::parse_query(*m, q));
  palps::Semantics sem(*m, o.semantics());
  auto mdp = palps::build_mdp(sem, {o.max_states, o.policy == "on", o.threads});
  bool partial = false;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    auto r = palps::check_query(mdp, *m, parsed[i]);
    std::cout << queries[i] << " = " << std::setprecision(12) << r.value << "  (iterations " << r.iterations
              << (r.partial ? ", partial" : "") << ")\n";
    partial |= r.partial;
  }
  if (partial) {
    std::cerr << "warning: state limit reached, values cover the explored part only\n";
    return kLimits;
  }
  return kOk;
}

struct SimArgs {
  int runs = 1;
  int ticks = 10;
  std::uint64_t seed = 1;
  std::string scheduler = "uniform";
  std::string out = "sim";
  std::string trace;
};

int cmd_simulate(const Common& o, const SimArgs& a) {
  auto m = load(o.model, true);
  if (!m) return kDomain;
  palps::Semantics sem(*m, o.semantics());
  palps::SimOptions so;
  so.ticks = a.ticks;
  so.seed = a.seed;
  so.scheduler = a.scheduler == "ordered" ? palps::Scheduler::Ordered : palps::Scheduler::Uniform;
  so.use_policy = o.policy == "on";
  auto batch = palps::simulate_batch(sem, so, a.runs, o.threads);
  {
    auto f = open_out(a.out + "_runs.csv");
    palps::write_batch_csv(f, batch);
  }
  {
    auto f = open_out(a.out + "_mean.csv");
    palps::write_mean_csv(f, batch);
  }
  if (!a.trace.empty()) {
    auto f = open_out(a.trace);
    palps::write_trace_csv(f, *m, palps::simulate(sem, so));
  }
  int deadlocked = 0;
  for (const auto& r : batch.runs) deadlocked += r.deadlock_tick >= 0;
  std::cout << "runs: " << a.runs << "\nticks: " << a.ticks << "\ndeadlocked_runs: " << deadlocked
            << "\nfinal_mean_population: " << std::setprecision(6) << batch.mean_population.back() << "\n";
  return kOk;
}

int cmd_translate(const Common& o, const std::string& out, const std::string& props,
                  const std::vector<std::string>& queries, const std::vector<std::string>& rewards) {
  auto m = load(o.model, true);
  if (!m) return kDomain;
  std::string text, ptext;
  try {
    text = palps::emit_prism(*m, palps::gc_layout(*m), rewards);
    if (!props.empty()) ptext = palps::emit_props(*m, queries);
  } catch (const palps::UnsupportedTerm& e) {
    std::cerr << "error: not translatable: " << e.what() << "\n";
    return kDomain;
  }
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
  if (!props.empty()) write_file(props, ptext);
  return kOk;
}

int cmd_verify(const Common& o, bool fault) {
  auto m = load(o.model, true);
  if (!m) return kDomain;
  auto rep = palps::gc::check_correspondence(*m, o.max_states, fault);
  std::cout << "translated_states: " << rep.gc_states << "\nstable_states: " << rep.gc_stable
            << "\ncalculus_states: " << rep.calculus_states << "\nmismatches: " << rep.mismatches.size() << "\n";
  for (const auto& s : rep.mismatches) std::cout << "  " << s << "\n";
  if (rep.truncated) {
    std::cerr << "error: state limit " << o.max_states << " reached\n";
    return kLimits;
  }
  return rep.mismatches.empty() ? kOk : kDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explore, analyse, simulate and translate population models"};
  app.require_subcommand(1);
  Common o;

  auto* parse = app.add_subcommand("parse", "parse and validate a model");
  add_model(parse, o);

  std::string dump;
  auto* explore = app.add_subcommand("explore", "build the state space and print statistics");
  add_model(explore, o);
  add_policy(explore, o);
  add_limits(explore, o);
  explore->add_option("--dump-mdp", dump, "write the MDP as JSON");

  std::vector<std::string> queries;
  auto* check = app.add_subcommand("check", "evaluate probability and reward queries");
  add_model(check, o);
  add_policy(check, o);
  add_limits(check, o);
  check->add_option("--query,-q", queries, "query, repeatable")->required();

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo simulation");
  add_model(sim, o);
  add_policy(sim, o);
  sim->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--runs", sa.runs, "number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--ticks", sa.ticks, "ticks per run")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", sa.seed, "seed of run 0; run i uses seed+i");
  sim->add_option("--scheduler", sa.scheduler, "nondeterminism resolution")
      ->check(CLI::IsMember({"uniform", "ordered"}));
  sim->add_option("--out", sa.out, "prefix for <out>_runs.csv and <out>_mean.csv");
  sim->add_option("--trace", sa.trace, "write the per-tick trace of run 0");

  std::string out, props;
  std::vector<std::string> rewards;
  auto* tr = app.add_subcommand("translate", "emit a guarded-command model");
  add_model(tr, o);
  tr->add_option("--out,-o", out, "output .nm file (default stdout)");
  tr->add_option("--props", props, "output properties file");
  tr->add_option("--query,-q", queries, "query to put in the properties file");
  tr->add_option("--rewards", rewards, "channels to count in reward blocks")->delimiter(',');

  bool fault = false;
  auto* verify = app.add_subcommand("verify", "check the translation against the calculus semantics");
  add_model(verify, o);
  add_limits(verify, o);
  verify->add_flag("--inject-fault", fault, "corrupt one command before checking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) return cmd_parse(o);
    if (*explore) return cmd_explore(o, dump);
    if (*check) return cmd_check(o, queries);
    if (*sim) return cmd_simulate(o, sa);
    if (*tr) return cmd_translate(o, out, props, queries, rewards);
    if (*verify) return cmd_verify(o, fault);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const palps::QueryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}
