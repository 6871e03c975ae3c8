#include "mapirl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mapirl {

bool MdpModel::is_legal(StateId s, ActionId a) const {
  const auto& acts = legal[static_cast<std::size_t>(s)];
  return std::binary_search(acts.begin(), acts.end(), a);
}

LegalFn MdpModel::legal_fn() const {
  auto sets = legal;
  return [sets = std::move(sets)](StateId s) { return sets[static_cast<std::size_t>(s)]; };
}

void MdpModel::validate(double tol) const {
  if (state_count <= 0 || action_count <= 0)
    throw std::logic_error("MdpModel: empty state or action space");
  double mu_sum = 0.0;
  for (double p : start_dist) {
    if (p < 0.0) throw std::logic_error("MdpModel: negative start probability");
    mu_sum += p;
  }
  if (std::abs(mu_sum - 1.0) > tol)
    throw std::logic_error("MdpModel: start distribution sums to " + std::to_string(mu_sum));
  for (StateId s = 0; s < state_count; ++s) {
    for (ActionId a : legal[static_cast<std::size_t>(s)]) {
      const auto& r = row(s, a);
      double p_sum = 0.0;
      for (const auto& e : r) {
        if (e.prob < 0.0 || e.next < 0 || e.next >= state_count)
          throw std::logic_error("MdpModel: bad transition entry");
        p_sum += e.prob;
      }
      if (std::abs(p_sum - 1.0) > tol)
        throw std::logic_error("MdpModel: transition row (" + std::to_string(s) + "," +
                               std::to_string(a) + ") sums to " + std::to_string(p_sum));
      if (is_terminal(s)) {
        if (r.size() != 1 || r[0].next != s || reward(s, a) != 0.0)
          throw std::logic_error("MdpModel: terminal state " + std::to_string(s) +
                                 " must self-loop with reward 0");
      }
    }
  }
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

StateId sample_from(const std::vector<double>& dist, std::mt19937_64& rng) {
  const double u = uniform_unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) return static_cast<StateId>(i);
  }
  // u landed in the rounding slack past the last positive entry
  for (std::size_t i = dist.size(); i-- > 0;)
    if (dist[i] > 0.0) return static_cast<StateId>(i);
  throw std::domain_error("sample_from: all-zero distribution");
}

StepResult step(const MdpModel& model, StateId s, ActionId a, std::mt19937_64& rng) {
  if (s < 0 || s >= model.state_count)
    throw std::domain_error("step: state out of range");
  if (!model.is_legal(s, a))
    throw std::domain_error("step: action " + std::to_string(a) + " illegal in state " +
                            std::to_string(s));
  if (model.is_terminal(s)) return {s, 0.0, true};
  const auto& r = model.row(s, a);
  const double u = uniform_unit(rng);
  double acc = 0.0;
  StateId next = r.back().next;
  for (const auto& e : r) {
    acc += e.prob;
    if (u < acc) {
      next = e.next;
      break;
    }
  }
  return {next, model.reward(s, a), model.is_terminal(next)};
}

}  // namespace mapirl
