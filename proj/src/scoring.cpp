#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "hotdesk/error.hpp"
#include "hotdesk/eval.hpp"

namespace hotdesk::eval {

namespace fs = std::filesystem;
using dataset::ToMSample;
using io::Json;
using io::PredictionRecord;

// ---------------------------------------------------------------------------
// HVT

double weighted_f1(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw Error("weighted_f1: label vectors differ in length");
  if (truth.empty()) throw Error("weighted_f1: no samples");
  std::map<int, long> tp, fp, fn, support;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++support[truth[i]];
    if (truth[i] == predicted[i]) {
      ++tp[truth[i]];
    } else {
      ++fp[predicted[i]];
      ++fn[truth[i]];
    }
  }
  double total = 0.0;
  for (const auto& [c, n] : support) {
    const double t = static_cast<double>(tp[c]);
    const double p = t + fp[c] > 0 ? t / (t + fp[c]) : 0.0;
    const double r = t / (t + fn[c]);
    const double f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    total += f1 * static_cast<double>(n);
  }
  return total / static_cast<double>(truth.size());
}

NodeId predicted_hvn(const PredictionRecord& pred, const ToMSample& sample) {
  const auto& p = pred.pred_hvn;
  if (p.empty()) throw Error("prediction " + pred.sample_id + ": empty pred_hvn");
  const bool per_candidate = p.size() == sample.hvns.size();
  NodeId best = -1;
  double best_p = -1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const NodeId node = per_candidate ? sample.hvns[i] : static_cast<NodeId>(i);
    if (p[i] > best_p || (p[i] == best_p && node < best)) {
      best_p = p[i];
      best = node;
    }
  }
  return best;
}

std::vector<std::pair<const ToMSample*, const PredictionRecord*>> match_predictions(
    const std::vector<PredictionRecord>& preds, const std::vector<ToMSample>& samples) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.sample_id, &p).second) {
      throw Error("predictions: duplicate sample_id '" + p.sample_id + "'");
    }
  }
  std::vector<std::pair<const ToMSample*, const PredictionRecord*>> out;
  std::vector<std::string> missing;
  std::size_t missing_count = 0;
  for (const auto& s : samples) {
    auto it = by_id.find(s.sample_id);
    if (it == by_id.end()) {
      if (missing.size() < 10) missing.push_back(s.sample_id);
      ++missing_count;
      continue;
    }
    out.emplace_back(&s, it->second);
  }
  if (missing_count) {
    std::string msg = "predictions missing for " + std::to_string(missing_count) + " samples:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(msg);
  }
  std::set<std::string> known;
  for (const auto& s : samples) known.insert(s.sample_id);
  for (const auto& p : preds) {
    if (!known.count(p.sample_id)) throw Error("prediction for unknown sample '" + p.sample_id + "'");
  }
  return out;
}

HvtScore score_hvt(const std::vector<PredictionRecord>& preds, const std::vector<ToMSample>& samples) {
  const auto pairs = match_predictions(preds, samples);
  std::vector<NodeId> truth_nodes, pred_nodes;
  std::vector<int> truth_keys, pred_keys;
  std::map<std::pair<std::string, NodeId>, int> keys;
  auto key = [&](const std::string& net, NodeId v) {
    return keys.emplace(std::make_pair(net, v), static_cast<int>(keys.size())).first->second;
  };
  for (const auto& [s, p] : pairs) {
    const NodeId predicted = predicted_hvn(*p, *s);
    truth_nodes.push_back(s->truth_hvn);
    pred_nodes.push_back(predicted);
    truth_keys.push_back(key(s->network, s->truth_hvn));
    pred_keys.push_back(key(s->network, predicted));
  }
  HvtScore out;
  out.samples = static_cast<int>(pairs.size());
  if (pairs.empty()) return out;
  out.weighted_f1 = weighted_f1(truth_keys, pred_keys);
  std::set<NodeId> classes(truth_nodes.begin(), truth_nodes.end());
  classes.insert(pred_nodes.begin(), pred_nodes.end());
  out.classes.assign(classes.begin(), classes.end());
  out.confusion = Matrix<long>(out.classes.size(), out.classes.size());
  auto index = [&](NodeId v) {
    return static_cast<std::size_t>(std::lower_bound(out.classes.begin(), out.classes.end(), v) -
                                    out.classes.begin());
  };
  for (std::size_t i = 0; i < truth_nodes.size(); ++i) ++out.confusion(index(truth_nodes[i]), index(pred_nodes[i]));
  return out;
}

// ---------------------------------------------------------------------------
// SR

std::vector<WeightingSpec> default_weightings() {
  return {{"neg", -1.0}, {"neutral", 0.0}, {"pos", 1.0}};
}

const TopologyCache::Entry& TopologyCache::get(const std::string& topology, std::uint64_t seed) {
  const auto key = std::make_pair(graph::canonical_topology_id(topology), seed);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    auto net = graph::generate_network(key.first, seed);
    auto cm = graph::all_pairs_shortest_paths(net);
    it = entries_.emplace(key, Entry{std::move(net), std::move(cm)}).first;
  }
  return it->second;
}

const graph::Network& TopologyCache::network(const std::string& topology, std::uint64_t seed) {
  return get(topology, seed).net;
}

const graph::CostMatrix& TopologyCache::cost(const std::string& topology, std::uint64_t seed) {
  return get(topology, seed).cm;
}

namespace {

transport::NodeDistribution prediction_distribution(const std::vector<double>& raw, std::size_t n,
                                                    const std::string& what) {
  if (raw.size() != n) {
    throw Error(what + ": expected " + std::to_string(n) + " entries, got " + std::to_string(raw.size()));
  }
  double total = 0.0;
  for (double x : raw) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(what + ": entries must be finite and non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-6) throw Error(what + ": not normalized (sum " + std::to_string(total) + ")");
  // Already on the simplex: keep the bits so a copied ground truth scores 0.
  if (std::abs(total - 1.0) <= transport::kNormalizationTol) return transport::NodeDistribution(raw);
  return transport::normalize(raw);
}

std::vector<double> remoteness_for(const ToMSample& s, const graph::Network& net,
                                   const graph::CostMatrix& cm, Remoteness kind) {
  if (kind == Remoteness::EntryOnly) return graph::node_remoteness_entry(net, cm);
  graph::HvnPlacement placement{s.hvns, s.truth_hvn_index};
  return graph::node_remoteness(net, cm, placement);
}

}  // namespace

std::vector<NtdRecord> score_sr(const std::vector<PredictionRecord>& preds,
                                const std::vector<ToMSample>& samples, const SrScoreOptions& opts,
                                TopologyCache& topologies) {
  const auto pairs = match_predictions(preds, samples);
  std::vector<std::string> gammas;
  for (double g : opts.gammas) gammas.push_back(io::gamma_key(g));
  for (const auto& [s, p] : pairs) topologies.cost(s->network, s->network_seed);

  const std::size_t per_sample = gammas.size() * opts.weightings.size();
  std::vector<NtdRecord> records(pairs.size() * per_sample);
  dataset::parallel_for(pairs.size(), opts.jobs, [&](std::size_t i) {
    const ToMSample& s = *pairs[i].first;
    const PredictionRecord& p = *pairs[i].second;
    const auto& net = topologies.network(s.network, s.network_seed);
    const auto& cm = topologies.cost(s.network, s.network_seed);
    const auto remote = remoteness_for(s, net, cm, opts.remoteness);
    std::vector<std::vector<double>> weights;
    for (const auto& w : opts.weightings) {
      weights.push_back(transport::combine_weights({{remote}, {w.coefficient}, opts.floor}));
    }
    std::size_t slot = i * per_sample;
    for (const auto& g : gammas) {
      auto truth_it = s.truth_sr.find(g);
      if (truth_it == s.truth_sr.end()) {
        throw Error("sample " + s.sample_id + ": no ground truth for gamma " + g);
      }
      auto pred_it = p.pred_sr.find(g);
      if (pred_it == p.pred_sr.end()) {
        throw Error("prediction " + s.sample_id + ": no pred_sr for gamma " + g);
      }
      const auto pred = prediction_distribution(pred_it->second, cm.size(),
                                                "prediction " + s.sample_id + " gamma " + g);
      for (std::size_t w = 0; w < opts.weightings.size(); ++w) {
        records[slot++] = NtdRecord{s.sample_id, s.network, g, opts.weightings[w].name,
                                    transport::ntd_weighted(pred, truth_it->second, cm, weights[w])};
      }
    }
  });
  return records;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<NtdStats> summarize(const std::vector<NtdRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.network, r.gamma, r.weighting}].push_back(r.ntd);
  std::vector<NtdStats> out;
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    NtdStats s;
    std::tie(s.network, s.gamma, s.weighting) = key;
    s.count = static_cast<int>(values.size());
    double total = 0.0;
    for (double v : values) total += v;
    s.mean = total / s.count;
    s.median = quantile(values, 0.5);
    s.q1 = quantile(values, 0.25);
    s.q3 = quantile(values, 0.75);
    s.min = values.front();
    s.max = values.back();
    out.push_back(s);
  }
  return out;
}

WeightingGap max_weighting_gap(const std::vector<NtdRecord>& records, const std::string& network,
                               const std::string& gamma, const std::string& pos,
                               const std::string& neg) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> by_sample;
  for (const auto& r : records) {
    if (r.network != network || r.gamma != gamma) continue;
    if (r.weighting != pos && r.weighting != neg) continue;
    if (!by_sample.count(r.sample_id)) order.push_back(r.sample_id);
    auto& slot = by_sample[r.sample_id];
    (r.weighting == pos ? slot.first : slot.second) = r.ntd;
  }
  std::optional<WeightingGap> best;
  for (const auto& id : order) {
    const auto& [p, n] = by_sample[id];
    if (!p || !n) continue;
    WeightingGap g{id, *p, *n};
    if (!best || std::abs(g.gap()) > std::abs(best->gap())) best = g;
  }
  if (!best) throw Error("max_weighting_gap: no samples for " + network + " gamma " + gamma);
  return *best;
}

// ---------------------------------------------------------------------------
// Reports

ScoreReport score_predictions(const std::vector<PredictionRecord>& preds,
                              const std::vector<ToMSample>& samples, const ScoreOptions& opts,
                              TopologyCache& topologies) {
  ScoreReport r;
  r.hvt = score_hvt(preds, samples);
  std::map<std::string, std::vector<ToMSample>> by_net;
  for (const auto& s : samples) by_net[s.network].push_back(s);
  for (const auto& [net, group] : by_net) {
    std::set<std::string> ids;
    for (const auto& s : group) ids.insert(s.sample_id);
    std::vector<PredictionRecord> subset;
    for (const auto& p : preds) {
      if (ids.count(p.sample_id)) subset.push_back(p);
    }
    r.hvt_by_network[net] = score_hvt(subset, group);
  }
  r.ntd_records = score_sr(preds, samples, opts.sr, topologies);
  r.ntd_stats = summarize(r.ntd_records);
  return r;
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

Json hvt_json(const HvtScore& h) {
  Json rows = Json::array(), norm = Json::array();
  for (std::size_t i = 0; i < h.classes.size(); ++i) {
    Json row = Json::array(), nrow = Json::array();
    long total = 0;
    for (std::size_t j = 0; j < h.classes.size(); ++j) total += h.confusion(i, j);
    for (std::size_t j = 0; j < h.classes.size(); ++j) {
      row.push_back(h.confusion(i, j));
      nrow.push_back(total ? static_cast<double>(h.confusion(i, j)) / total : 0.0);
    }
    rows.push_back(row);
    norm.push_back(nrow);
  }
  return Json{{"classes", h.classes},
              {"confusion", rows},
              {"confusion_row_normalized", norm},
              {"samples", h.samples},
              {"weighted_f1", h.weighted_f1}};
}

}  // namespace

void write_score_reports(const ScoreReport& report, const std::vector<PredictionRecord>& preds,
                         const std::vector<ToMSample>& samples, const ScoreOptions& opts,
                         TopologyCache& topologies, const fs::path& dir) {
  Json by_network = Json::object();
  for (const auto& [net, h] : report.hvt_by_network) {
    by_network[net] = hvt_json(h);
    std::string csv = "true\\pred";
    for (NodeId c : h.classes) csv += "," + std::to_string(c);
    csv += "\n";
    for (std::size_t i = 0; i < h.classes.size(); ++i) {
      csv += std::to_string(h.classes[i]);
      for (std::size_t j = 0; j < h.classes.size(); ++j) csv += "," + std::to_string(h.confusion(i, j));
      csv += "\n";
    }
    io::write_text(dir / ("confusion_" + net + ".csv"), csv);
  }

  std::string samples_csv = "sample_id,network,gamma,weighting,ntd\n";
  for (const auto& r : report.ntd_records) {
    samples_csv += r.sample_id + "," + r.network + "," + r.gamma + "," + r.weighting + "," + fmt(r.ntd) + "\n";
  }
  io::write_text(dir / "ntd_samples.csv", samples_csv);

  Json stats = Json::array();
  std::string stats_csv = "network,gamma,weighting,count,mean,median,q1,q3,min,max\n";
  for (const auto& s : report.ntd_stats) {
    stats_csv += s.network + "," + s.gamma + "," + s.weighting + "," + std::to_string(s.count) + "," +
                 fmt(s.mean) + "," + fmt(s.median) + "," + fmt(s.q1) + "," + fmt(s.q3) + "," +
                 fmt(s.min) + "," + fmt(s.max) + "\n";
    stats.push_back(Json{{"count", s.count}, {"gamma", s.gamma},   {"max", s.max},
                         {"mean", s.mean},   {"median", s.median}, {"min", s.min},
                         {"network", s.network}, {"q1", s.q1},     {"q3", s.q3},
                         {"weighting", s.weighting}});
  }
  io::write_text(dir / "ntd_stats.csv", stats_csv);

  std::map<std::string, const ToMSample*> sample_by_id;
  for (const auto& s : samples) sample_by_id[s.sample_id] = &s;
  std::map<std::string, const PredictionRecord*> pred_by_id;
  for (const auto& p : preds) pred_by_id[p.sample_id] = &p;

  bool has_pos = false, has_neg = false;
  for (const auto& w : opts.sr.weightings) {
    has_pos = has_pos || w.name == "pos";
    has_neg = has_neg || w.name == "neg";
  }

  Json gaps = Json::array(), hedging = Json::array();
  std::string gap_csv = "network,gamma,sample_id,ntd_pos,ntd_neg,gap\n";
  std::set<std::string> networks;
  for (const auto& s : samples) networks.insert(s.network);
  for (const auto& net : networks) {
    for (double gamma : opts.sr.gammas) {
      const std::string g = io::gamma_key(gamma);
      if (has_pos && has_neg) {
        const auto gap = max_weighting_gap(report.ntd_records, net, g);
        gap_csv += net + "," + g + "," + gap.sample_id + "," + fmt(gap.ntd_pos) + "," +
                   fmt(gap.ntd_neg) + "," + fmt(gap.gap()) + "\n";
        const ToMSample& s = *sample_by_id.at(gap.sample_id);
        const auto& pred = pred_by_id.at(gap.sample_id)->pred_sr.at(g);
        const auto& truth = s.truth_sr.at(g).mass;
        std::string vec_csv = "node,pred,truth\n";
        for (std::size_t v = 0; v < truth.size(); ++v) {
          vec_csv += std::to_string(v) + "," + fmt(pred[v]) + "," + fmt(truth[v]) + "\n";
        }
        io::write_text(dir / ("weighting_gap_" + net + "_" + g + ".csv"), vec_csv);
        gaps.push_back(Json{{"gamma", g}, {"gap", gap.gap()}, {"network", net},
                            {"ntd_neg", gap.ntd_neg}, {"ntd_pos", gap.ntd_pos},
                            {"sample_id", gap.sample_id}});
      }

      std::vector<std::vector<double>> points;
      std::vector<std::string> ids;
      std::uint64_t net_seed = 0;
      for (const auto& s : samples) {
        if (s.network != net) continue;
        points.push_back(pred_by_id.at(s.sample_id)->pred_sr.at(g));
        ids.push_back(s.sample_id);
        net_seed = s.network_seed;
      }
      if (points.size() < static_cast<std::size_t>(opts.k)) continue;
      const auto h = hedging_clusters(points, topologies.network(net, net_seed), opts.k, opts.seed);
      std::string csv = "cluster,size,dominant_branch\n";
      for (std::size_t c = 0; c < h.clusters.sizes.size(); ++c) {
        csv += std::to_string(c) + "," + std::to_string(h.clusters.sizes[c]) + "," +
               std::to_string(h.branch_labels[c]) + "\n";
      }
      io::write_text(dir / ("hedging_" + net + "_" + g + ".csv"), csv);
      Json assign = Json::object();
      for (std::size_t i = 0; i < ids.size(); ++i) assign[ids[i]] = h.clusters.assignment[i];
      hedging.push_back(Json{{"assignment", assign}, {"branch_labels", h.branch_labels},
                             {"gamma", g}, {"network", net}, {"sizes", h.clusters.sizes}});
    }
  }
  io::write_text(dir / "weighting_gap.csv", gap_csv);

  Json out{{"hedging", hedging},
           {"hvt", hvt_json(report.hvt)},
           {"hvt_by_network", by_network},
           {"ntd_stats", stats},
           {"schema_version", io::kSchemaVersion},
           {"weighting_gaps", gaps}};
  io::write_json(dir / "score.json", out);
}

}  // namespace hotdesk::eval
