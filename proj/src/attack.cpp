#include "starcloak/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace starcloak {

std::vector<Placement> enumerate_placements(std::span<const SegmentId> S,
                                            std::span<const double> prior,
                                            int k_minus_1) {
  std::vector<Placement> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(std::max(0, k_minus_1)), 0);
  // Non-decreasing index sequences enumerate multisets.
  for (;;) {
    Placement p;
    p.segs.reserve(idx.size());
    p.weight = 1.0;
    for (std::size_t i : idx) {
      p.segs.push_back(S[i]);
      p.weight *= prior[i];
    }
    out.push_back(std::move(p));
    int pos = static_cast<int>(idx.size()) - 1;
    while (pos >= 0 && idx[pos] == S.size() - 1) --pos;
    if (pos < 0) break;
    std::size_t v = idx[pos] + 1;
    for (std::size_t j = pos; j < idx.size(); ++j) idx[j] = v;
  }
  return out;
}

namespace {

bool placement_consistent(const std::vector<SegmentId>& placement,
                          const std::vector<SegmentId>& injected) {
  // Every injected segment must appear in the placement with multiplicity.
  std::vector<SegmentId> p = placement;
  for (SegmentId s : injected) {
    auto it = std::find(p.begin(), p.end(), s);
    if (it == p.end()) return false;
    p.erase(it);
  }
  return true;
}

double overlap_score(const std::vector<SegmentId>& replayed,
                     std::span<const SegmentId> S, bool exact_match) {
  if (replayed.empty()) return 0.0;
  if (exact_match) {
    if (replayed.size() != S.size()) return 0.0;
    return std::equal(replayed.begin(), replayed.end(), S.begin()) ? 1.0 : 0.0;
  }
  std::size_t inter = 0;
  for (SegmentId s : replayed)
    if (std::binary_search(S.begin(), S.end(), s)) ++inter;
  return static_cast<double>(inter) / static_cast<double>(S.size());
}

// Orderings of a multiset: (k-1)! / prod(mult!).
double ordering_count(const std::vector<SegmentId>& multiset) {
  double num = 1.0;
  for (std::size_t i = 2; i <= multiset.size(); ++i) num *= static_cast<double>(i);
  double den = 1.0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= multiset.size(); ++i) {
    if (i < multiset.size() && multiset[i] == multiset[i - 1]) {
      ++run;
    } else {
      for (std::size_t j = 2; j <= run; ++j) den *= static_cast<double>(j);
      run = 1;
    }
  }
  return num / den;
}

// Multichoose with an early bail at `cap`.
std::uint64_t multiset_count_capped(std::size_t n, int k, std::uint64_t cap) {
  // C(n + k - 1, k) computed incrementally.
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n + k - i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap) * 2) return cap + 1;
  }
  return static_cast<std::uint64_t>(c + 0.5L);
}

std::vector<double> effective_prior(std::span<const SegmentId> S,
                                    const AttackKnowledge& kn) {
  if (!kn.segment_prior.empty()) {
    if (kn.segment_prior.size() != S.size())
      throw ConfigError("segment prior size mismatch");
    return kn.segment_prior;
  }
  return std::vector<double>(S.size(), 1.0 / static_cast<double>(S.size()));
}

}  // namespace

std::vector<Placement> apply_injection(std::vector<Placement> placements,
                                       const std::vector<SegmentId>& injected) {
  if (injected.empty()) return placements;
  for (Placement& p : placements)
    if (!placement_consistent(p.segs, injected)) p.weight = 0.0;
  return placements;
}

double replay_likelihood(std::span<const SegmentId> S, SegmentId s,
                         std::span<const SegmentId> placement, ReplayCloaker& cloaker,
                         const AttackKnowledge& kn, Rng& rng) {
  double sum = 0.0;
  for (int r = 0; r < kn.replays; ++r) {
    std::vector<SegmentId> replayed = cloaker.replay(s, placement, rng);
    std::sort(replayed.begin(), replayed.end());
    sum += overlap_score(replayed, S, kn.exact_match_replay);
  }
  return kn.replays > 0 ? sum / kn.replays : 0.0;
}

std::vector<double> correlation_likelihoods(std::span<const SegmentId> S,
                                            ReplayCloaker& cloaker,
                                            const AttackKnowledge& kn) {
  std::vector<double> prior = effective_prior(S, kn);
  const int k_eff = cloaker.placement_aware() ? std::max(1, kn.cohort_k) : 1;
  const int co_users = k_eff - 1;

  std::vector<double> out(S.size(), 0.0);
  for (std::size_t si = 0; si < S.size(); ++si) {
    SegmentId s = S[si];
    Rng rng = Rng::seeded(kn.seed, 0x61747461636bULL ^ (si * 0x9e3779b97f4a7c15ULL));
    std::map<std::vector<SegmentId>, double> like_cache;
    auto like_of = [&](const std::vector<SegmentId>& m) {
      auto it = like_cache.find(m);
      if (it != like_cache.end()) return it->second;
      double v = replay_likelihood(S, s, m, cloaker, kn, rng);
      like_cache.emplace(m, v);
      return v;
    };

    if (co_users == 0) {
      out[si] = prior[si] * like_of({});
      continue;
    }

    std::uint64_t count = multiset_count_capped(S.size(), co_users, kn.budget);
    if (!kn.force_monte_carlo && count <= kn.budget) {
      auto placements = apply_injection(
          enumerate_placements(S, prior, co_users), kn.injected);
      double acc = 0.0;
      for (const Placement& p : placements) {
        if (p.weight == 0.0) continue;
        acc += prior[si] * p.weight * like_of(p.segs);
      }
      out[si] = acc;
    } else {
      // Importance sampling from the iid-tuple distribution: a multiset M
      // arrives with probability orderings(M) * weight(M), so averaging
      // f(M)/orderings(M) over draws estimates sum_M weight(M) * f(M).
      double acc = 0.0;
      for (std::uint64_t b = 0; b < kn.budget; ++b) {
        std::vector<SegmentId> m;
        m.reserve(co_users);
        for (int j = 0; j < co_users; ++j) {
          double u = rng.uniform();
          double cum = 0.0;
          std::size_t pick = S.size() - 1;
          for (std::size_t t = 0; t < prior.size(); ++t) {
            cum += prior[t];
            if (u < cum) {
              pick = t;
              break;
            }
          }
          m.push_back(S[pick]);
        }
        std::sort(m.begin(), m.end());
        if (!placement_consistent(m, kn.injected)) continue;
        acc += like_of(m) / ordering_count(m);
      }
      out[si] = prior[si] * acc / static_cast<double>(kn.budget);
    }
  }
  return out;
}

std::pair<double, double> entropy_of(std::span<const double> link) {
  double h = 0.0;
  for (double p : link)
    if (p > 0) h -= p * std::log2(p);
  double norm = link.size() > 1 ? h / std::log2(static_cast<double>(link.size())) : 0.0;
  return {h, norm};
}

LinkabilityProfile linkability(std::span<const SegmentId> S, ReplayCloaker& cloaker,
                               const AttackKnowledge& kn) {
  LinkabilityProfile prof;
  std::vector<double> like = correlation_likelihoods(S, cloaker, kn);
  double denom = 0.0;
  for (double v : like) denom += v;
  prof.link.resize(S.size());
  if (denom <= 0.0) {
    std::fill(prof.link.begin(), prof.link.end(),
              1.0 / static_cast<double>(S.size()));
  } else {
    for (std::size_t i = 0; i < like.size(); ++i) prof.link[i] = like[i] / denom;
  }
  auto [h, norm] = entropy_of(prof.link);
  prof.entropy = h;
  prof.normalized_entropy = norm;
  return prof;
}

// ---------------------------------------------------------------------------
// Replay handles

EngineReplayCloaker::EngineReplayCloaker(ReplayContext ctx,
                                         std::vector<CohortMember> cohort,
                                         std::size_t victim_index)
    : ctx_(std::move(ctx)), cohort_(std::move(cohort)), victim_idx_(victim_index) {}

std::vector<SegmentId> EngineReplayCloaker::replay(
    SegmentId victim_seg, std::span<const SegmentId> placement, Rng& rng) {
  EngineConfig cfg = ctx_.engine_cfg;
  cfg.seed = rng.next();
  cfg.integrity_checks = false;
  cfg.prune_workers = 1;
  Engine engine(ctx_.net, ctx_.segs, ctx_.stars, ctx_.sg, ctx_.costs,
                ctx_.cost_params, cfg);

  double t0 = cohort_.empty() ? 0.0 : cohort_[0].t;
  for (const CohortMember& m : cohort_) t0 = std::min(t0, m.t);

  struct Entry {
    double t;
    std::size_t idx;
    SegmentId seg;
  };
  std::vector<Entry> entries;
  std::size_t co = 0;
  double horizon = 0.0;
  for (std::size_t i = 0; i < cohort_.size(); ++i) {
    SegmentId seg;
    if (i == victim_idx_) {
      seg = victim_seg;
    } else {
      // Hypothesized placement positions for the co-users; fall back to
      // their true segments when the placement is shorter.
      seg = co < placement.size() ? placement[co] : cohort_[i].true_segment;
      ++co;
    }
    double t = cohort_[i].t - t0;
    entries.push_back({t, i, seg});
    horizon = std::max(horizon, t + cohort_[i].profile.sigma_t);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.t < b.t; });

  const double dt = 0.1;
  std::size_t next = 0;
  QueryId victim_id = 0;
  for (double now = 0.0; now <= horizon + dt; now += dt) {
    while (next < entries.size() && entries[next].t <= now) {
      const Entry& e = entries[next];
      const CohortMember& m = cohort_[e.idx];
      RawQuery raw;
      raw.user = m.user;
      raw.t = e.t;
      raw.knn_k = m.knn_k;
      raw.profile = m.profile;
      double offset = ctx_.segs[e.seg].length / 2.0;
      engine.submit(raw, e.seg, offset);
      if (e.idx == victim_idx_) victim_id = query_hash(m.user, e.t);
      ++next;
    }
    engine.advance(now);
  }
  engine.advance(horizon + 1.0);

  for (const RegionEvent& r : engine.region_events()) {
    if (std::find(r.cohort.begin(), r.cohort.end(), victim_id) != r.cohort.end())
      return r.segments;
  }
  return {};
}

BaselineReplayCloaker::BaselineReplayCloaker(const RoadNetwork& net,
                                             const SegmentSet& segs,
                                             const StarSet& stars, const StarGraph& sg,
                                             BaselineKind kind, CohortMember victim,
                                             std::vector<ActiveQuery> others)
    : net_(net),
      segs_(segs),
      stars_(stars),
      sg_(sg),
      kind_(kind),
      victim_(std::move(victim)),
      others_(std::move(others)) {}

std::vector<SegmentId> BaselineReplayCloaker::replay(
    SegmentId victim_seg, std::span<const SegmentId> /*placement*/, Rng& rng) {
  Query q;
  q.id = victim_.id;
  q.user = victim_.user;
  q.t = victim_.t;
  q.segment = victim_seg;
  q.offset = segs_[victim_seg].length / 2.0;
  q.knn_k = victim_.knn_k;
  q.profile = victim_.profile;
  q.t_exp = victim_.t + victim_.profile.sigma_t;

  std::vector<ActiveQuery> active = others_;
  active.push_back({victim_.user, victim_seg});

  std::optional<BaselineRegion> region;
  if (kind_ == BaselineKind::kRandomSampling)
    region = random_sampling_cloak(q, segs_, stars_, sg_, active, rng);
  else
    region = network_expansion_cloak(q, net_, segs_, stars_, sg_, active);
  if (!region) return {};
  return region->segments;
}

std::unique_ptr<ReplayCloaker> make_replay_cloaker(
    const std::string& algorithm, const ReplayContext& ctx, const RegionEvent& region,
    const std::vector<QueryEvent>& events, std::size_t victim_index) {
  std::map<QueryId, const QueryEvent*> by_id;
  for (const QueryEvent& ev : events) by_id[ev.id] = &ev;

  std::vector<CohortMember> cohort;
  for (QueryId qid : region.cohort) {
    auto it = by_id.find(qid);
    if (it == by_id.end()) throw DataError("region cohort query missing from events");
    const QueryEvent& ev = *it->second;
    CohortMember m;
    m.id = ev.id;
    m.user = ev.user;
    m.t = ev.issue_t;
    m.true_segment = ev.true_segment;
    m.knn_k = ev.knn_k;
    m.profile = ev.profile;
    cohort.push_back(std::move(m));
  }
  if (cohort.empty()) throw DataError("empty region cohort");
  victim_index = std::min(victim_index, cohort.size() - 1);

  if (algorithm == "random" || algorithm == "expansion") {
    BaselineKind kind = algorithm == "random" ? BaselineKind::kRandomSampling
                                              : BaselineKind::kNetworkExpansion;
    // Public trace: queries live at the cloaking instant, minus the victim.
    std::vector<ActiveQuery> others;
    const QueryEvent* victim_ev = by_id.at(cohort[victim_index].id);
    for (const QueryEvent& ev : events) {
      if (ev.id == victim_ev->id) continue;
      if (ev.issue_t <= region.t && region.t < ev.issue_t + ev.profile.sigma_t)
        others.push_back({ev.user, ev.true_segment});
    }
    return std::make_unique<BaselineReplayCloaker>(ctx.net, ctx.segs, ctx.stars,
                                                   ctx.sg, kind, cohort[victim_index],
                                                   std::move(others));
  }

  EngineConfig cfg = ctx.engine_cfg;
  if (algorithm == "basic") cfg.mode = EngineConfig::Mode::kBasic;
  else if (algorithm == "bounded") cfg.mode = EngineConfig::Mode::kBounded;
  else if (algorithm == "hybrid") cfg.mode = EngineConfig::Mode::kHybrid;
  else throw ConfigError("unknown algorithm " + algorithm);
  ReplayContext rc = ctx;
  rc.engine_cfg = cfg;
  return std::make_unique<EngineReplayCloaker>(rc, std::move(cohort), victim_index);
}

std::string attack_report_csv(const std::vector<RegionAttackRow>& rows) {
  std::string out =
      "region_id,algorithm,size,k,injections,entropy,normalized_entropy,"
      "max_linkability\n";
  char buf[128];
  for (const RegionAttackRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%s,%zu,%d,%d,%.6f,%.6f,%.6f\n",
                  static_cast<unsigned long long>(r.region_id), r.algorithm.c_str(),
                  r.size, r.k, r.injections, r.entropy, r.normalized_entropy,
                  r.max_linkability);
    out += buf;
  }
  return out;
}

}  // namespace starcloak
