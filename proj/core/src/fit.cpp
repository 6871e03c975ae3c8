#include "mapirl/fit.hpp"

#include "mapirl/objectives.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mapirl {

LrpFit fit_lrp(const DemonstrationSet& demos, const FeatureMaps& maps, const LegalFn& legal,
               double gamma, double beta, std::optional<double> ridge,
               const SolverConfig& config) {
  if (demos.trajectories.empty()) throw std::invalid_argument("demonstration set is empty");
  LrpFit fit;
  fit.matrices = build_lstdq(demos, maps, gamma, ridge);
  if (fit.matrices.skipped_short == static_cast<int>(demos.trajectories.size())) {
    throw SingularityError(
        "every trajectory is too short to contribute a TD pair; provide longer demonstrations");
  }
  const SoftmaxObjective objective =
      SoftmaxObjective::compile_lrp(demos, maps, legal, beta, fit.matrices.C);
  fit.result = maximize([&objective](const Vec& w) { return objective.eval(w); }, maps.m_R, config);
  fit.reward.w_R = fit.result.params;
  fit.values.w_Q = fit.matrices.C * fit.reward.w_R;
  fit.values.beta = beta;
  return fit;
}

LpoFit fit_lpo(const DemonstrationSet& demos, const FeatureMaps& maps, const LegalFn& legal,
               double beta, const SolverConfig& config) {
  if (demos.trajectories.empty()) throw std::invalid_argument("demonstration set is empty");
  const SoftmaxObjective objective = SoftmaxObjective::compile_lpo(demos, maps, legal, beta);
  LpoFit fit;
  fit.result = maximize([&objective](const Vec& w) { return objective.eval(w); }, maps.m_Q, config);
  fit.values.w_Q = fit.result.params;
  fit.values.beta = beta;
  return fit;
}

PolicyTable greedy_policy(const QParams& values, const FeatureMaps& maps, const LegalFn& legal,
                          int state_count) {
  PolicyTable table;
  table.probs.resize(static_cast<std::size_t>(state_count));
  for (StateId s = 0; s < state_count; ++s) {
    const std::vector<ActionId> acts = legal(s);
    if (acts.empty()) throw std::domain_error("no legal actions for greedy extraction");
    ActionId best = acts.front();
    double best_q = maps.g_Q(s, acts.front()).dot(values.w_Q);
    for (std::size_t j = 1; j < acts.size(); ++j) {
      const double q = maps.g_Q(s, acts[j]).dot(values.w_Q);
      if (q > best_q) {
        best_q = q;
        best = acts[j];
      }
    }
    Vec row = Vec::Zero(maps.action_count);
    row[best] = 1.0;
    table.probs[static_cast<std::size_t>(s)] = std::move(row);
  }
  return table;
}

namespace {

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const nlohmann::json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

}  // namespace

std::string params_to_json(const ParamsDoc& doc) {
  nlohmann::json j;
  j["model"] = doc.model;
  j["beta"] = doc.beta;
  j["gamma"] = doc.gamma;
  j["ridge"] = doc.ridge;
  if (doc.w_R) j["w_R"] = vec_to_json(*doc.w_R);
  j["w_Q"] = vec_to_json(doc.w_Q);
  j["feature_spec"] = doc.feature_spec;
  j["objective"] = doc.objective;
  j["converged"] = doc.converged;
  return j.dump(2) + "\n";
}

ParamsDoc params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid parameter document: ") + e.what(), 1);
  }
  try {
    ParamsDoc doc;
    doc.model = j.at("model").get<std::string>();
    if (doc.model != "lrp" && doc.model != "lpo") {
      throw ParseError("model must be \"lrp\" or \"lpo\"", 1);
    }
    doc.beta = j.at("beta").get<double>();
    doc.gamma = j.at("gamma").get<double>();
    doc.ridge = j.at("ridge").get<double>();
    if (j.contains("w_R")) doc.w_R = vec_from_json(j.at("w_R"));
    doc.w_Q = vec_from_json(j.at("w_Q"));
    doc.feature_spec = j.at("feature_spec").get<std::string>();
    doc.objective = j.at("objective").get<double>();
    doc.converged = j.at("converged").get<bool>();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid parameter document: ") + e.what(), 1);
  }
}

void write_params(const ParamsDoc& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << params_to_json(doc);
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParamsDoc read_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str());
}

}  // namespace mapirl
