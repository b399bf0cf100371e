// pybind11 surface: the main operations (environment loading, formula
// translation, HOA import, product construction, the exact oracle, training
// and evaluation) for scripting and smoke tests.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexirl/env_io.hpp"
#include "lexirl/experiment.hpp"
#include "lexirl/hoa.hpp"
#include "lexirl/learn.hpp"
#include "lexirl/ltl.hpp"
#include "lexirl/oracle.hpp"
#include "lexirl/product.hpp"

namespace py = pybind11;
using namespace lexirl;

namespace {

Schedule make_schedule(std::pair<double, double> startend) {
  Schedule s;
  s.start = startend.first;
  s.end = startend.second;
  return s;
}

Hyper make_hyper(double gamma, double r_safety, double r_ltl, std::pair<double, double> alpha,
                 std::pair<double, double> epsilon, std::pair<double, double> upsilon,
                 std::pair<double, double> tau_safety, std::pair<double, double> tau_ltl,
                 long episodes) {
  Hyper h;
  h.gamma = gamma;
  h.r_safety = r_safety;
  h.r_ltl = r_ltl;
  h.alpha = make_schedule(alpha);
  h.epsilon = make_schedule(epsilon);
  h.upsilon = make_schedule(upsilon);
  h.tau_safety = make_schedule(tau_safety);
  h.tau_ltl = make_schedule(tau_ltl);
  h.set_horizon(episodes);
  return h;
}

struct TrainOutput {
  ProductMdp product;
  Hyper hyper;
  TrainResult result;
};

py::dict eval_to_dict(const EvalStats& s) {
  py::dict d;
  d["mean_return"] = s.mean_return;
  d["stderr_return"] = s.stderr_return;
  d["safety_frequency"] = s.safety_frequency;
  d["buchi_frequency"] = s.buchi_frequency;
  d["episodes"] = s.episodes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lexirl, m) {
  m.doc() = "lexicographic safety/LTL/return reinforcement learning on labeled MDPs";

  py::class_<LtlFormula>(m, "LtlFormula")
      .def("__repr__", [](const LtlFormula& f) { return print_ltl(f); })
      .def_property_readonly("is_safety",
                             [](const LtlFormula& f) { return is_syntactic_safety(f); });

  py::class_<SafetyAutomaton>(m, "SafetyAutomaton")
      .def_property_readonly("num_states", &SafetyAutomaton::num_states)
      .def_property_readonly("ap", [](const SafetyAutomaton& a) { return a.ap; })
      .def("to_hoa", [](const SafetyAutomaton& a) { return print_hoa(a); });

  py::class_<Ldba>(m, "Ldba")
      .def_property_readonly("num_states", &Ldba::num_states)
      .def_property_readonly("ap", [](const Ldba& l) { return l.ap; })
      .def("validate", &validate_suitable)
      .def("to_hoa", [](const Ldba& l) { return print_hoa(l); });

  py::class_<LabeledMdp>(m, "LabeledMdp")
      .def_property_readonly("num_states", &LabeledMdp::num_states)
      .def_property_readonly("atomic_props", [](const LabeledMdp& m_) { return m_.atomic_props; })
      .def_property_readonly("initial", [](const LabeledMdp& m_) { return m_.initial; })
      .def("state_name", &LabeledMdp::state_name)
      .def("validate", &validate_mdp)
      .def("to_text", &format_mdp);

  py::class_<Environment>(m, "Environment")
      .def_readonly("mdp", &Environment::mdp)
      .def_property_readonly("is_grid", [](const Environment& e) { return e.grid.has_value(); });

  py::class_<ProductMdp>(m, "ProductMdp")
      .def_property_readonly("num_states", &ProductMdp::num_states)
      .def_readonly("full_state_count", &ProductMdp::full_state_count)
      .def_readonly("initial", &ProductMdp::initial)
      .def("state_name", &ProductMdp::state_name)
      .def("action_name", &ProductMdp::action_name);

  py::class_<ProductPolicy>(m, "ProductPolicy");

  m.def("parse_ltl", &parse_ltl, py::arg("text"), py::arg("alphabet"));
  m.def("parse_hoa", &parse_hoa, py::arg("text"));
  m.def("safety_to_automaton", &safety_to_automaton, py::arg("formula"),
        py::arg("max_states") = 10000);
  m.def("ldba_from_safety", &ldba_from_safety);
  m.def("parse_environment", &parse_environment, py::arg("text"));
  m.def("load_environment", &load_environment, py::arg("path"));
  m.def("fixture_example1", &fixture_example1);
  m.def("build_product", &build_product, py::arg("mdp"), py::arg("safety"), py::arg("ldba"));

  m.def(
      "oracle",
      [](const ProductMdp& p) {
        OracleResult r = run_oracle(p);
        py::dict d;
        d["initial"] = p.initial;
        d["pr_safety"] = r.pr_safety;
        d["pr_buchi"] = r.pr_buchi_restricted;
        py::list safe_sets, lex_sets;
        for (int x = 0; x < p.num_states(); ++x) {
          py::list sa, sl;
          for (int a : r.a_safety[x]) sa.append(p.action_name(a));
          for (int a : r.a_lex[x]) sl.append(p.action_name(a));
          safe_sets.append(sa);
          lex_sets.append(sl);
        }
        d["a_safety"] = safe_sets;
        d["a_lex"] = lex_sets;
        d["residual_safety"] = r.safety_residual;
        d["residual_buchi"] = r.buchi_residual;
        return d;
      },
      py::arg("product"));

  m.def(
      "max_combined_prob",
      [](const ProductMdp& p) {
        std::vector<bool> acc(p.num_states());
        for (int x = 0; x < p.num_states(); ++x) acc[x] = p.b_safety[x] && p.b_ltl[x];
        return max_buchi_prob(p, full_action_sets(p), acc);
      },
      py::arg("product"));

  py::class_<TrainOutput>(m, "TrainOutput")
      .def_property_readonly("episodes",
                             [](const TrainOutput& t) { return t.result.episodes; })
      .def_property_readonly("visits", [](const TrainOutput& t) { return t.result.visits; })
      .def("greedy_policy",
           [](const TrainOutput& t) {
             return greedy_policy(t.result.q, t.product, hyper_at(t.hyper, t.result.episodes));
           })
      .def("checkpoint_json", [](const TrainOutput& t) {
        return checkpoint_to_json(t.product, t.result.q, t.result.episodes, "", "");
      });

  m.def(
      "train",
      [](const ProductMdp& p, long episodes, int horizon, std::uint64_t seed, double gamma,
         double r_safety, double r_ltl, std::pair<double, double> alpha,
         std::pair<double, double> epsilon, std::pair<double, double> upsilon,
         std::pair<double, double> tau_safety, std::pair<double, double> tau_ltl) {
        TrainOutput out{p, make_hyper(gamma, r_safety, r_ltl, alpha, epsilon, upsilon,
                                      tau_safety, tau_ltl, episodes),
                        {}};
        TrainOptions opt;
        opt.episodes = episodes;
        opt.horizon = horizon;
        Rng rng(seed);
        out.result = train(out.product, out.hyper, opt, rng);
        return out;
      },
      py::arg("product"), py::arg("episodes"), py::arg("horizon"), py::arg("seed") = 1,
      py::arg("gamma") = 0.99, py::arg("r_safety") = 1e-4, py::arg("r_ltl") = 1e-2,
      py::arg("alpha") = std::pair<double, double>{0.5, 0.05},
      py::arg("epsilon") = std::pair<double, double>{0.5, 0.005},
      py::arg("upsilon") = std::pair<double, double>{0.5, 0.05},
      py::arg("tau_safety") = std::pair<double, double>{0.5, 0.05},
      py::arg("tau_ltl") = std::pair<double, double>{0.5, 0.05});

  m.def(
      "evaluate",
      [](const ProductMdp& p, const ProductPolicy& pi, long episodes, int horizon,
         std::uint64_t seed) {
        Rng rng(seed);
        return eval_to_dict(evaluate(p, pi, episodes, horizon, rng));
      },
      py::arg("product"), py::arg("policy"), py::arg("episodes"), py::arg("horizon"),
      py::arg("seed") = 1);

  m.def(
      "exact_policy_value",
      [](const ProductMdp& p, const ProductPolicy& pi, const std::string& objective) {
        Objective obj = Objective::QocReturn;
        if (objective == "safety_prob")
          obj = Objective::SafetyProb;
        else if (objective == "buchi_prob")
          obj = Objective::BuchiProb;
        else if (objective != "qoc_return")
          throw std::invalid_argument("objective must be qoc_return|safety_prob|buchi_prob");
        return exact_policy_value(p, pi, obj);
      },
      py::arg("product"), py::arg("policy"), py::arg("objective") = "qoc_return");

  m.attr("__version__") = "0.1.0";
}
