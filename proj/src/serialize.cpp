#include "hardy/serialize.hpp"

#include <charconv>
#include <cmath>

namespace hardy {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

namespace {

nlohmann::json numbers(std::span<const double> v) {
  nlohmann::json out = nlohmann::json::array();
  for (double d : v) out.push_back(json_number(d));
  return out;
}

nlohmann::json witness_json(const AxiomWitness& w) {
  nlohmann::json out = {{"axiom", to_string(w.axiom)},
                        {"x", numbers(w.x.values())},
                        {"w", numbers(w.w.values())},
                        {"defect", json_number(w.defect)}};
  if (w.other_x) out["other_x"] = numbers(w.other_x->values());
  if (w.other_w) out["other_w"] = numbers(w.other_w->values());
  if (w.scalar != 0.0) out["scalar"] = json_number(w.scalar);
  if (!w.permutation.empty()) out["permutation"] = w.permutation;
  return out;
}

}  // namespace

nlohmann::json to_json(const HardyEstimate& e) {
  nlohmann::json out = {{"value", json_number(e.value)},
                        {"direction", to_string(e.direction)},
                        {"N", e.n},
                        {"method", e.method},
                        {"diagnostics", e.diagnostics},
                        {"warnings", e.warnings}};
  out["witness"] = e.witness ? numbers(*e.witness) : nlohmann::json(nullptr);
  return out;
}

nlohmann::json to_json(const CheckReport& r) {
  return {{"check", r.check},
          {"pass", r.pass},
          {"instances", r.instances},
          {"worst_margin", json_number(r.worst_margin)},
          {"witness", r.witness},
          {"details", r.details},
          {"notes", r.notes}};
}

nlohmann::json to_json(const AxiomReport& r) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : r.outcomes) {
    nlohmann::json item = {{"axiom", to_string(o.axiom)},
                           {"required", o.required},
                           {"trials", o.trials},
                           {"failures", o.failures},
                           {"worst_defect", json_number(o.worst_defect)},
                           {"passed", o.passed()}};
    item["witness"] = o.witness ? witness_json(*o.witness) : nlohmann::json(nullptr);
    outcomes.push_back(std::move(item));
  }
  return {{"mean", r.mean},
          {"tolerance", r.tolerance},
          {"seed", r.seed},
          {"pass", r.ok()},
          {"outcomes", outcomes}};
}

nlohmann::json to_json(const RatioReport& r) {
  nlohmann::json out = {{"N", r.n},
                        {"ratios", numbers(r.ratios)},
                        {"max_term_ratios", numbers(r.max_term_ratios)},
                        {"is_nonincreasing", r.is_nonincreasing},
                        {"ratio_limit_estimate", json_number(r.ratio_limit_estimate)},
                        {"ratio_limit_closed_form", r.ratio_limit_closed_form},
                        {"partial_sum_at_n", json_number(r.partial_sum_at_n)},
                        {"verdict", to_string(r.verdict)},
                        {"justification", r.justification}};
  out["exact_partial_sum_at_n"] =
      r.exact_partial_sum_at_n ? nlohmann::json(to_string(*r.exact_partial_sum_at_n)) : nlohmann::json(nullptr);
  return out;
}

nlohmann::json to_json(const LscTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) rows.push_back({{"k", row.k}, {"value", json_number(row.value)}});
  return {{"rows", rows},
          {"baseline", json_number(t.baseline)},
          {"limit_target", json_number(t.limit_target)},
          {"limit_error", json_number(t.limit_error)},
          {"min_margin", json_number(t.min_margin)},
          {"below_baseline", t.below_baseline},
          {"pass", t.pass}};
}

nlohmann::json document(const std::string& kind, const nlohmann::json& body) {
  nlohmann::json out = {{"schema", kSchema}, {"kind", kind}};
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  return out;
}

}  // namespace hardy
