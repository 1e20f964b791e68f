#include "palps/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace palps {

namespace {

int sample(std::mt19937_64& rng, const std::vector<ProbOption>& opts) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < opts.size(); ++i) {
    acc += to_double(opts[i].p);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(opts.size()) - 1;
}

}  // namespace

Trace simulate(const Semantics& sem, const SimOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const Policy& policy = sem.model().policy;
  Trace tr;
  Configuration c = sem.initial();
  tr.env.push_back(c.env);
  std::size_t steps_this_tick = 0;
  while (static_cast<int>(tr.env.size()) <= opt.ticks) {
    if (++steps_this_tick > opt.max_steps_per_tick) throw Error("too many steps without a tick");
    ++tr.steps;
    auto choices = sem.prob_choices(c);
    if (!choices.empty()) {
      std::vector<int> picks;
      picks.reserve(choices.size());
      for (const auto& ch : choices) picks.push_back(sample(rng, ch.options));
      c = sem.apply_prob(c, choices, picks);
      continue;
    }
    auto moves = sem.moves(c);
    if (opt.use_policy && !policy.empty() && moves.size() > 1) {
      std::set<ActionLabel> enabled;
      for (const auto& mv : moves) enabled.insert(mv.label);
      std::erase_if(moves, [&](const Move& mv) { return policy.dominated(mv.label, enabled); });
    }
    if (moves.empty()) {
      tr.deadlock_tick = static_cast<int>(tr.env.size()) - 1;
      break;
    }
    std::size_t pick = 0;
    if (opt.scheduler == Scheduler::Uniform) {
      pick = std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng);
    } else {
      auto rank = [&](std::size_t i) {
        const auto& mv = moves[i];
        bool tick = mv.kind == Move::Kind::Tick;
        int first = tick ? -1 : c.individuals[mv.a].id;
        if (mv.kind == Move::Kind::Sync) first = std::min(first, c.individuals[mv.b].id);
        return std::tuple(tick, first, i);
      };
      for (std::size_t i = 1; i < moves.size(); ++i)
        if (rank(i) < rank(pick)) pick = i;
    }
    const bool tick = moves[pick].kind == Move::Kind::Tick;
    c = sem.apply(c, moves[pick]);
    if (tick) {
      tr.env.push_back(c.env);
      steps_this_tick = 0;
    }
  }
  // A deadlocked run keeps its last environment for the remaining ticks.
  while (static_cast<int>(tr.env.size()) <= opt.ticks) tr.env.push_back(tr.env.back());
  return tr;
}

BatchResult simulate_batch(const Semantics& sem, const SimOptions& opt, int runs, int threads) {
  BatchResult out;
  out.runs.resize(runs);
  std::vector<std::vector<int>> pops(runs);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < runs;) {
      try {
        SimOptions o = opt;
        o.seed = opt.seed + static_cast<std::uint64_t>(i);
        Trace t = simulate(sem, o);
        std::vector<int> p;
        for (const auto& e : t.env) p.push_back(e.total());
        out.runs[i] = {i, o.seed, p.back(), t.deadlock_tick};
        pops[i] = std::move(p);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  threads = std::max(1, std::min(threads, runs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.mean_population.assign(opt.ticks + 1, 0.0);
  for (const auto& p : pops)
    for (int t = 0; t <= opt.ticks; ++t) out.mean_population[t] += p[t];
  if (runs > 0)
    for (auto& v : out.mean_population) v /= runs;
  return out;
}

void write_trace_csv(std::ostream& os, const Model& m, const Trace& t) {
  const int L = m.habitat.size();
  const int S = static_cast<int>(m.species.size());
  os << "tick";
  for (int l = 0; l < L; ++l)
    for (int s = 0; s < S; ++s) os << ',' << m.location_name(LocationId{l}) << ':' << m.species_name(SpeciesId{s});
  os << '\n';
  for (std::size_t k = 0; k < t.env.size(); ++k) {
    os << k;
    for (int l = 0; l < L; ++l)
      for (int s = 0; s < S; ++s) os << ',' << t.env[k].count(LocationId{l}, SpeciesId{s});
    os << '\n';
  }
}

void write_batch_csv(std::ostream& os, const BatchResult& b) {
  os << "run,seed,final_population,deadlock_tick\n";
  for (const auto& r : b.runs) os << r.run << ',' << r.seed << ',' << r.final_population << ',' << r.deadlock_tick << '\n';
}

void write_mean_csv(std::ostream& os, const BatchResult& b) {
  os << "tick,mean_population\n";
  for (std::size_t t = 0; t < b.mean_population.size(); ++t) os << t << ',' << b.mean_population[t] << '\n';
}

}  // namespace palps
