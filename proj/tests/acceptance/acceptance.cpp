// Acceptance harness: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
//
//   qqmr_acceptance [--config desk.cfg] [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "line_env.hpp"
#include "oracles.hpp"
#include "qqmr/config_io.hpp"
#include "qqmr/frame.hpp"
#include "qqmr/metrics.hpp"
#include "qqmr/queues.hpp"
#include "qqmr/report.hpp"
#include "qqmr/routing.hpp"
#include "qqmr/simulation.hpp"
#include "qqmr/sweep.hpp"
#include "qqmr/trainer.hpp"
#include "qqmr/wfcm.hpp"

#ifndef QQMR_DESK_CONFIG
#define QQMR_DESK_CONFIG "configs/desk.cfg"
#endif

using namespace qqmr;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;  // printed indented under the verdict
};

struct Context {
  SimConfig desk;
  std::uint64_t closure_runs = 0;
  std::uint64_t closure_failures = 0;
  std::uint64_t closure_samples = 0;
  double worst_energy_error = 0.0;

  void record(const ClosureCheck& c) {
    ++closure_runs;
    if (!c.ok() || c.samples == 0) ++closure_failures;
    closure_samples += c.samples;
    worst_energy_error = std::max(worst_energy_error, c.worst_energy_error);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// --- 1 -------------------------------------------------------------------

Verdict wfcm_invariants(Context&) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> n_dist(10, 100);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_row = 0, worst_weight = 0, worst_rise = 0, min_j = 0;
  int sweeps_checked = 0;
  for (int inst = 0; inst < 200; ++inst) {
    std::vector<FeatureVector> x(static_cast<std::size_t>(n_dist(rng)));
    for (auto& row : x) {
      for (double& v : row) v = unit(rng);
    }
    WfcmParams params;
    params.seed = static_cast<std::uint64_t>(inst);
    const ClusterModel model = run_wfcm(x, params);
    for (const Memberships& u : model.memberships) {
      worst_row = std::max(worst_row, std::abs(u[0] + u[1] + u[2] - 1.0));
    }
    for (const FeatureVector& w : model.weights) {
      worst_weight = std::max(worst_weight, std::abs(w[0] + w[1] + w[2] + w[3] - 1.0));
    }
    for (double j : model.objective_trace) min_j = std::min(min_j, j);

    // Alternating sweeps with the weights held fixed.
    Centers v{};
    for (std::size_t k = 0; k < kClusterCount; ++k) {
      for (double& c : v[k]) c = unit(rng);
    }
    WeightMatrix w{};
    for (auto& row : w) {
      double s = 0;
      for (double& c : row) s += (c = unit(rng) + 0.05);
      for (double& c : row) c /= s;
    }
    std::vector<Memberships> u = update_memberships(x, v, w, params.m);
    double prev = objective(x, u, v, w, params.m);
    for (int sweep = 0; sweep < 30; ++sweep) {
      v = update_centers(x, u, params.m, v);
      const double after_centers = objective(x, u, v, w, params.m);
      u = update_memberships(x, v, w, params.m);
      const double after_members = objective(x, u, v, w, params.m);
      worst_rise = std::max({worst_rise, after_centers - prev, after_members - after_centers});
      min_j = std::min(min_j, after_members);
      prev = after_members;
      ++sweeps_checked;
    }
  }
  Verdict v;
  v.pass = worst_row <= 1e-9 && worst_weight <= 1e-9 && min_j >= 0 && worst_rise <= 1e-10;
  v.detail = fmt("200 instances, %d fixed-weight sweeps; max |row-1| %.1e, max |wsum-1| %.1e, "
                 "min J %.3g, max J rise %.3g",
                 sweeps_checked, worst_row, worst_weight, min_j, worst_rise);
  return v;
}

// --- 2 -------------------------------------------------------------------

Verdict planted_recovery(Context&) {
  // Raw profiles: (delay s, free buffer pkts, error rate, residual energy J).
  const std::array<FeatureVector, 3> profiles{{
      {0.005, 90.0, 0.30, 40.0},
      {0.060, 30.0, 0.02, 60.0},
      {0.030, 55.0, 0.15, 95.0},
  }};
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 0.03);
  std::vector<FeatureVector> raw;
  std::vector<int> plant;
  for (int g = 0; g < 3; ++g) {
    for (int i = 0; i < 10; ++i) {
      FeatureVector f = profiles[static_cast<std::size_t>(g)];
      for (double& c : f) c *= 1.0 + noise(rng);
      raw.push_back(f);
      plant.push_back(g);
    }
  }
  const auto x = normalize_features(raw);
  const ClusterModel model = run_wfcm(x, WfcmParams{});
  std::array<int, 3> perm{0, 1, 2};
  std::size_t best = 0;
  do {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& u = model.memberships[i];
      const auto k = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
      if (perm[k] == plant[i]) ++agree;
    }
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  Verdict v;
  v.pass = best * 10 >= x.size() * 9;
  v.detail = fmt("%zu/30 nodes agree with the plant (%u iterations)", best, model.iterations);
  return v;
}

// --- 3 -------------------------------------------------------------------

Verdict queue_conservation(Context&) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double total = 100, lo = 10, hi = 80;
  QueueVector cap{100.0 / 3, 100.0 / 3, 100.0 / 3};
  double worst_real = 0;
  long worst_int = 0;
  std::size_t clamp_violations = 0;
  for (int step = 0; step < 100000; ++step) {
    QueueVector occ{}, lambda{};
    for (std::size_t p = 0; p < 3; ++p) {
      occ[p] = std::floor(unit(rng) * (cap[p] + 1));
      occ[p] = std::min(occ[p], std::floor(cap[p]));
      lambda[p] = unit(rng) < 0.1 ? 0.0 : unit(rng) * 50;
    }
    const double l1 = unit(rng);
    cap = update_queue_capacities(cap, occ, lambda, total, l1, 1 - l1, lo, hi);
    const QueueCounts rounded = round_capacities(cap, 100);
    worst_real = std::max(worst_real, std::abs(cap[0] + cap[1] + cap[2] - total));
    worst_int = std::max(worst_int, std::labs(static_cast<long>(rounded[0] + rounded[1] + rounded[2]) - 100));
    for (std::size_t p = 0; p < 3; ++p) {
      const double floor_p = std::max(lo, std::min(occ[p], hi));
      if (cap[p] < floor_p - 1e-9 || cap[p] > hi + 1e-9) ++clamp_violations;
      if (rounded[p] < lo || rounded[p] > hi) ++clamp_violations;
    }
  }

  // Spreadsheet values for C = 100, B = (40, 10, 5), lambda = (2, 1, 1),
  // starting from (40, 30, 30) with l1 = l2 = 0.5.
  const QueueVector expected_proposal{66.25, 40.625, 38.125};
  const QueueVector expected{6625.0 / 145, 4062.5 / 145, 3812.5 / 145};
  const QueueVector start{40, 30, 30}, b{40, 10, 5}, rates{2, 1, 1};
  const QueueVector proposal = propose_capacities(start, b, rates, total, 0.5, 0.5);
  const QueueVector got = update_queue_capacities(start, b, rates, total, 0.5, 0.5, lo, hi);
  double worked = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    worked = std::max({worked, std::abs(proposal[p] - expected_proposal[p]),
                       std::abs(got[p] - expected[p])});
  }
  const QueueCounts r = round_capacities(got, 100);
  const bool rounding = r == QueueCounts{46, 28, 26};

  Verdict v;
  v.pass = worst_real <= 1.0 && worst_int <= 1 && clamp_violations == 0 && worked <= 1e-9 && rounding;
  v.detail = fmt("1e5 steps: max |sum-C| %.2e real, %ld rounded, %zu clamp violations; worked "
                 "example error %.1e, rounded (%u,%u,%u)",
                 worst_real, worst_int, clamp_violations, worked, r[0], r[1], r[2]);
  return v;
}

// --- 4 -------------------------------------------------------------------

std::array<std::uint64_t, 3> prints(const NodeState& n) {
  return {n.q_tables[0].fingerprint(), n.q_tables[1].fingerprint(), n.q_tables[2].fingerprint()};
}

Verdict reward_and_q(Context& ctx) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t out_of_range = 0, terminal_errors = 0;
  for (int i = 0; i < 100000; ++i) {
    std::vector<LinkContext> set(1 + rng() % 6);
    for (auto& c : set) {
      c.delay = unit(rng) * 0.2;
      c.error_rate = unit(rng);
      c.energy = unit(rng) * 100;
      c.free_buffer = std::floor(unit(rng) * 100);
    }
    const auto norm = normalize_context(set);
    const TrafficClass p = class_at(rng() % 3);
    const double u = unit(rng);
    const double r = immediate_reward(p, u, norm[rng() % norm.size()], NextState::intermediate);
    if (!(r >= -100.0 && r <= 100.0)) ++out_of_range;
    if (immediate_reward(p, u, norm[0], NextState::sink) != 100.0) ++terminal_errors;
    if (immediate_reward(p, u, norm[0], NextState::local_minimum) != -100.0) ++terminal_errors;
  }

  double closed_form = 0;
  for (double alpha : {0.1, 0.5, 0.9, 1.0}) {
    for (double r : {100.0, -100.0}) {
      PolicyTable t;
      for (int k = 1; k <= 60; ++k) {
        const double q = q_update(t, 1, 0, r, 0.0, alpha, 0.5);
        closed_form = std::max(closed_form, std::abs(q - r * (1 - std::pow(1 - alpha, k))));
      }
    }
  }

  // Packets of mixed classes one at a time through a live network; each must
  // leave the other two classes' tables untouched everywhere.
  SimConfig c = ctx.desk;
  c.node_count = 25;
  c.pretrain_episodes = 0;
  c.sim_duration = 400;
  c.rng_seed = 4;
  SimulationOptions opt;
  opt.generate_traffic = false;
  Simulation sim(c, Protocol::qqmr, opt);
  double t = c.warmup + 1.0;
  sim.run_until(t);
  std::size_t foreign_changes = 0, own_changes = 0, finished = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<std::array<std::uint64_t, 3>> before;
    for (const NodeState& n : sim.graph().nodes()) before.push_back(prints(n));
    const auto source = static_cast<NodeId>(1 + rng() % c.node_count);
    const TrafficClass cls = class_at(rng() % 3);
    const std::uint64_t id = sim.inject_packet(source, cls, t + 0.001);
    t += 0.2;
    sim.run_until(t);
    while (sim.trace(id).fate == PacketFate::in_flight && t < c.sim_duration) sim.run_until(t += 0.2);
    if (sim.trace(id).fate != PacketFate::in_flight) ++finished;
    bool own = false;
    for (const NodeState& n : sim.graph().nodes()) {
      const auto now = prints(n);
      for (std::size_t q = 0; q < 3; ++q) {
        if (now[q] == before[n.id][q]) continue;
        if (q == index_of(cls)) own = true;
        else ++foreign_changes;
      }
    }
    if (own) ++own_changes;
  }

  Verdict v;
  v.pass = out_of_range == 0 && terminal_errors == 0 && closed_form <= 1e-12 &&
           foreign_changes == 0 && own_changes > 0 && finished == 1000;
  v.detail = fmt("1e5 rewards, %zu out of range, %zu terminal mismatches; closed-form error %.1e; "
                 "1000 packets, %zu finished, %zu foreign table changes, %zu own-class updates",
                 out_of_range, terminal_errors, closed_form, finished, foreign_changes, own_changes);
  return v;
}

// --- 5 -------------------------------------------------------------------

Verdict optimal_policy(Context&) {
  const fixture::FiveNode env;
  int matches = 0;
  std::string mismatch;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<PolicySet> tables(env.node_count());
    TrainerConfig tc;
    tc.episodes = 300;
    tc.seed = seed;
    train(env, tables, tc);
    bool all = true;
    for (TrafficClass p : kAllClasses) {
      const auto mdp = env.mdp(p);
      const auto expected = oracle::optimal_policy(mdp, oracle::value_iteration(mdp, tc.gamma));
      const auto got = greedy_policy(env, tables, p);
      for (NodeId s = 1; s < 5; ++s) {
        if (got[s] != expected[s]) {
          all = false;
          if (mismatch.empty()) {
            mismatch = fmt("; first mismatch seed %llu class %d state %u",
                           static_cast<unsigned long long>(seed), static_cast<int>(p), s);
          }
        }
      }
    }
    if (all) ++matches;
  }
  Verdict v;
  v.pass = matches == 10;
  v.detail = fmt("greedy policy equals value iteration on %d/10 seeds", matches) + mismatch;
  return v;
}

// --- 6 -------------------------------------------------------------------

Verdict backup_failover(Context&) {
  SimConfig c;
  c.area_side = 150;
  c.comm_range = 50;
  c.sim_duration = 8;
  c.per_bit_error_prob = 0;
  c.collision_kappa = 0;
  c.ack_loss_prob = 0;
  c.rng_seed = 6;
  SimulationOptions opt;
  opt.generate_traffic = false;
  // Sink below, two relays, the source above them and a leaf beyond it.
  opt.sink_position = Position{75, 30};
  opt.user_positions = {{50, 70}, {100, 70}, {75, 110}, {75, 150}};
  const NodeId source = 3;

  auto scripted = [&](std::vector<NodeId> kill) {
    Simulation sim(c, Protocol::qqmr, opt);
    for (NodeId k : kill) sim.kill_node_at(k, 2.9);
    const auto id = sim.inject_packet(source, TrafficClass::emergency, 3.0);
    sim.run();
    return std::make_pair(sim.trace(id), sim.report());
  };

  const auto [healthy, healthy_report] = scripted({});
  const bool healthy_ok = healthy.fate == PacketFate::delivered && healthy.path.size() == 3;
  const NodeId main = healthy_ok ? healthy.path[1] : 1;
  const NodeId other = main == 1 ? 2 : 1;

  const auto [fail, fail_report] = scripted({main});
  const bool via_backup = fail.fate == PacketFate::delivered && fail.backup_hops == 1 &&
                          fail.path.size() == 3 && fail.path[1] == other;

  const auto [dead, dead_report] = scripted({1, 2});
  const bool counted = dead.fate == PacketFate::dropped && dead_report.dropped() == 1 &&
                       dead_report.generated == 1 && dead_report.delivered == 0;

  Verdict v;
  v.pass = healthy_ok && via_backup && counted;
  v.detail = fmt("main relay %u; after its failure delivered=%d via %u with %u backup hop(s); "
                 "both relays down: dropped=%d (%s), drops counted %llu",
                 main, fail.fate == PacketFate::delivered, fail.path.size() > 1 ? fail.path[1] : 0,
                 fail.backup_hops, dead.fate == PacketFate::dropped,
                 std::string(to_string(dead.cause)).c_str(),
                 static_cast<unsigned long long>(dead_report.dropped()));
  return v;
}

// --- 7 -------------------------------------------------------------------

Verdict convergence(Context& ctx) {
  int converged = 0;
  int shaped = 0;
  std::string episodes;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig c = ctx.desk;
    c.node_count = 30;
    c.pretrain_episodes = 500;
    c.sim_duration = c.warmup + 1;
    c.rng_seed = seed;
    SimulationOptions opt;
    opt.generate_traffic = false;
    Simulation sim(c, Protocol::qqmr, opt);
    sim.run();
    ctx.record(sim.closure());
    const auto& tr = sim.pretraining();
    if (!tr) continue;
    const auto& r = tr->episode_returns;
    const auto at = track_convergence(r, 20, 0.05);
    if (at && *at < 400) ++converged;
    episodes += at ? fmt(" %zu", *at) : std::string(" -");
    // Rising phase then plateau: the first window sits below the plateau.
    if (at && r.size() >= 40) {
      const double head = std::accumulate(r.begin(), r.begin() + 20, 0.0) / 20;
      const double tail = std::accumulate(r.end() - 20, r.end(), 0.0) / 20;
      if (head <= tail) ++shaped;
    }
  }
  Verdict v;
  v.pass = converged >= 9 && shaped >= 9;
  v.detail = fmt("converged before episode 400 on %d/10 seeds, rise-then-plateau on %d/10; "
                 "episodes:",
                 converged, shaped) + episodes;
  return v;
}

// --- 8 -------------------------------------------------------------------

// Hop count vs density and energy vs rate are reported but not scored.
bool scored_pair(Scenario sc, Metric m) {
  if (sc == Scenario::density) return m != Metric::hc;
  return m != Metric::ec;
}

Verdict trends(Context& ctx) {
  std::vector<std::uint64_t> seeds(10);
  std::iota(seeds.begin(), seeds.end(), 1);
  Verdict v;
  v.pass = true;
  std::string summary;
  for (Scenario sc : {Scenario::density, Scenario::rate}) {
    SweepPlan plan;
    plan.base = ctx.desk;
    plan.scenario = sc;
    plan.grid = default_grid(sc);
    plan.protocols = {Protocol::qqmr, Protocol::greedy};
    plan.seeds = seeds;
    const auto specs = plan_runs(plan);
    const auto outcomes = execute_runs(specs, jobs());
    std::vector<RunRecord> records;
    for (const auto& o : outcomes) {
      ctx.record(o.closure);
      records.push_back(o.record);
    }
    for (Protocol proto : plan.protocols) {
      std::string line = fmt("%-7s %-6s", std::string(to_string(sc)).c_str(),
                             std::string(to_string(proto)).c_str());
      for (std::size_t mi = 0; mi < kMetricCount; ++mi) {
        const auto metric = static_cast<Metric>(mi);
        std::vector<double> xs, means;
        for (const CellStats& cell : aggregate(records, metric)) {
          if (cell.protocol != proto || cell.n == 0) continue;
          xs.push_back(cell.param_value);
          means.push_back(cell.mean);
        }
        const double rho = xs.size() >= 2 ? oracle::spearman(xs, means) : 0.0;
        const bool ok = xs.size() == plan.grid.size() &&
                        (metric == Metric::pdr ? rho <= -0.8 : rho >= 0.8);
        const bool scored = scored_pair(sc, metric);
        line += fmt(" | %s rho %+.2f%s", std::string(to_string(metric)).c_str(), rho,
                    !scored ? "(i)" : ok ? "" : "*");
        if (proto == Protocol::qqmr && scored && !ok) {
          v.pass = false;
          summary += fmt(" %s/%s", std::string(to_string(sc)).c_str(),
                         std::string(to_string(metric)).c_str());
        }
        line += " [";
        for (std::size_t i = 0; i < means.size(); ++i) line += fmt(i ? " %.4g" : "%.4g", means[i]);
        line += "]";
      }
      v.notes.push_back(line);
    }
    const double top = plan.grid.back();
    double q = 0, g = 0;
    for (const CellStats& cell : aggregate(records, Metric::pdr)) {
      if (cell.param_value != top) continue;
      (cell.protocol == Protocol::qqmr ? q : g) = cell.mean;
    }
    const bool wins = q >= g;
    if (!wins) {
      v.pass = false;
      summary += fmt(" %s/top-cell", std::string(to_string(sc)).c_str());
    }
    v.notes.push_back(fmt("%s top cell %g: qqmr PDR %.2f%% vs greedy %.2f%%",
                          std::string(to_string(sc)).c_str(), top, q, g));
  }
  v.notes.push_back("* failing scored pair, (i) informational pair");
  v.detail = "QQMR trend signs over both grids and top-cell PDR vs greedy";
  if (!summary.empty()) v.detail += "; failing:" + summary;
  return v;
}

// --- 9 -------------------------------------------------------------------

Verdict determinism(Context& ctx) {
  SweepPlan plan;
  plan.base = ctx.desk;
  plan.scenario = Scenario::rate;
  plan.grid = {5, 20};
  plan.protocols = {Protocol::qqmr, Protocol::greedy};
  plan.seeds = {1, 2, 3};
  const auto specs = plan_runs(plan);
  auto csv = [&](unsigned j) {
    std::vector<RunRecord> records;
    for (const auto& o : execute_runs(specs, j)) {
      ctx.record(o.closure);
      records.push_back(o.record);
    }
    return to_csv(records);
  };
  const std::string a = csv(1), b = csv(1), c = csv(jobs() > 1 ? jobs() : 2);
  const bool identical = a == b && a == c;
  Verdict v;
  v.pass = identical && ctx.closure_failures == 0 && ctx.closure_runs > 0;
  v.detail = fmt("repeat CSV identical=%d (%zu bytes); closure held in %llu/%llu runs over %llu "
                 "samples, worst energy error %.2e J",
                 identical, a.size(),
                 static_cast<unsigned long long>(ctx.closure_runs - ctx.closure_failures),
                 static_cast<unsigned long long>(ctx.closure_runs),
                 static_cast<unsigned long long>(ctx.closure_samples), ctx.worst_energy_error);
  return v;
}

// --- 10 ------------------------------------------------------------------

Verdict crc_soundness(Context&) {
  DataPacket p;
  p.header = 0xA55A;
  p.packet_type = PacketType::emergency;
  p.source_id = 7;
  p.destination_id = 0;
  p.timestamp_ms = 123456;
  p.payload.resize(64 - kFrameOverheadBytes);
  std::iota(p.payload.begin(), p.payload.end(), std::uint8_t{1});
  const auto frame = seal(p);
  std::size_t detected = 0;
  for (std::size_t bit = 0; bit < frame.size() * 8; ++bit) {
    auto flipped = frame;
    flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (verify_checksum(flipped) == ChecksumStatus::corrupt) ++detected;
  }
  const std::vector<std::uint8_t> none;
  const bool empty_ok = compute_checksum(none) == oracle::crc16_ccitt_false(none);

  DataPacket bare;
  auto bare_frame = seal(bare);
  const bool bare_ok =
      bare.checksum == oracle::crc16_ccitt_false(encode_body(bare)) &&
      verify_checksum(bare_frame) == ChecksumStatus::ok;

  Verdict v;
  v.pass = frame.size() == 64 && detected == 512 && empty_ok && bare_ok;
  v.detail = fmt("%zu-byte frame, %zu/%zu single-bit flips detected; empty input 0x%04X, "
                 "empty-payload frame matches oracle=%d",
                 frame.size(), detected, frame.size() * 8, compute_checksum(none), bare_ok);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path = QQMR_DESK_CONFIG;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[++i];
    } else {
      only.insert(std::atoi(arg.c_str()));
    }
  }

  Context ctx;
  try {
    ctx.desk = parse_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load %s: %s\n", config_path.c_str(), e.what());
    return 64;
  }

  const std::vector<std::pair<const char*, std::function<Verdict(Context&)>>> criteria{
      {"wfcm invariants", wfcm_invariants},
      {"planted cluster recovery", planted_recovery},
      {"queue capacity conservation", queue_conservation},
      {"reward and q-update properties", reward_and_q},
      {"optimal policy oracle", optimal_policy},
      {"backup failover", backup_failover},
      {"learning convergence", convergence},
      {"trend reproduction", trends},
      {"determinism and closure", determinism},
      {"crc soundness", crc_soundness},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::printf("%s [%d] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", number, criteria[i].first,
                v.detail.c_str(), secs);
    for (const auto& note : v.notes) std::printf("    %s\n", note.c_str());
    std::fflush(stdout);
  }
  return failed;
}
