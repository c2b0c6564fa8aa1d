#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "ftlab/env.hpp"
#include "ftlab/error.hpp"
#include "ftlab/gen.hpp"
#include "ftlab/parse.hpp"
#include "ftlab/quant.hpp"
#include "ftlab/server.hpp"

namespace py = pybind11;
using namespace ftlab;

namespace {

// Structured values cross the boundary as JSON text; the Python side decodes.
std::string dump(const Json& j) { return j.dump(); }

GenConfig make_config(int n_basic, int n_gates, int max_children,
                      std::tuple<double, double, double> weights, double p_lo,
                      double p_hi, double share_prob) {
  GenConfig c;
  c.n_basic = n_basic;
  c.n_gates = n_gates;
  c.max_children = max_children;
  c.gate_weights = {std::get<0>(weights), std::get<1>(weights), std::get<2>(weights)};
  c.p_lo = p_lo;
  c.p_hi = p_hi;
  c.share_prob = share_prob;
  return c;
}

RewardMode make_mode(const std::string& kind, double eps_rel) {
  RewardMode mode;
  if (kind == "symmetric") {
    mode.kind = RewardKind::kSymmetric;
  } else if (kind == "paper_pessimistic") {
    mode.kind = RewardKind::kPaperPessimistic;
  } else {
    throw py::value_error("unknown reward mode '" + kind + "'");
  }
  mode.eps_rel = eps_rel;
  return mode;
}

CutSetAction make_action(const std::string& type, const std::string& a, const std::string& b) {
  if (type == "remove_edge") return CutSetAction::remove_edge(a, b);
  if (type == "remove_vertex") return CutSetAction::remove_vertex(a);
  if (type == "submit") return CutSetAction::submit();
  throw py::value_error("unknown action type '" + type + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fault-tree analysis engine bindings";
  m.attr("PROTOCOL_VERSION") = std::string(kProtocolVersion);

  // Exception types live as long as the interpreter; raw pointers avoid
  // static py::object destructors running after finalization.
  static PyObject* error_type = PyErr_NewException("ftlab._core.Error", PyExc_RuntimeError, nullptr);
  static PyObject* parse_error_type =
      PyErr_NewException("ftlab._core.ParseError", PyExc_ValueError, nullptr);
  m.attr("Error") = py::handle(error_type);
  m.attr("ParseError") = py::handle(parse_error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::object inst = py::reinterpret_borrow<py::object>(parse_error_type)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("line") = e.line();
      inst.attr("column") = e.column();
      PyErr_SetObject(parse_error_type, inst.ptr());
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  py::class_<FaultTree>(m, "FaultTree")
      .def_property_readonly("top", &FaultTree::top)
      .def_property_readonly("basic_events", &FaultTree::basic_events)
      .def_property_readonly("gates", &FaultTree::gates)
      .def("__len__", &FaultTree::size)
      .def("__eq__", [](const FaultTree& a, const FaultTree& b) { return a == b; })
      .def("children", [](const FaultTree& t, const std::string& id) {
        const Vertex* v = t.find(id);
        if (v == nullptr) throw py::key_error(id);
        return v->children;
      })
      .def("probability", [](const FaultTree& t, const std::string& id) -> py::object {
        const Vertex* v = t.find(id);
        if (v == nullptr) throw py::key_error(id);
        if (!v->prob) return py::none();
        return py::float_(*v->prob);
      })
      .def("kind", [](const FaultTree& t, const std::string& id) {
        const Vertex* v = t.find(id);
        if (v == nullptr) throw py::key_error(id);
        return std::string(to_string(v->type));
      })
      .def("to_ftdsl", &serialize_ftdsl)
      .def("to_openpsa", &serialize_openpsa, py::arg("name") = "FT")
      .def("topological_order", &topological_order)
      .def("violations", [](const FaultTree& t) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate(t).violations) {
          out.emplace_back(std::string(to_string(v.code)), v.locus);
        }
        return out;
      });

  m.def("parse", &parse_tree, py::arg("source"));
  m.def("parse_ftdsl", &parse_ftdsl, py::arg("source"));
  m.def("parse_openpsa", &parse_openpsa, py::arg("source"));
  m.def("load", [](const std::string& path) { return load_tree(path); }, py::arg("path"));

  m.def(
      "generate",
      [](std::uint64_t seed, int n_basic, int n_gates, int max_children,
         std::tuple<double, double, double> weights, double p_lo, double p_hi,
         double share_prob) {
        return generate(
            make_config(n_basic, n_gates, max_children, weights, p_lo, p_hi, share_prob), seed);
      },
      py::arg("seed"), py::arg("n_basic") = 6, py::arg("n_gates") = 3,
      py::arg("max_children") = 3, py::arg("gate_weights") = std::make_tuple(1.0, 1.0, 1.0),
      py::arg("p_lo") = 0.01, py::arg("p_hi") = 0.3, py::arg("share_prob") = 0.0);

  m.def(
      "top_probability",
      [](const FaultTree& t, const std::string& method, std::size_t node_cap) {
        if (method == "bdd") return bdd_top_probability(build_bdd(t, node_cap), basic_probabilities(t));
        if (method == "brute") return brute_force_probability(t);
        if (method == "bottom_up") return prob_bottom_up(t).at(t.top());
        throw py::value_error("unknown method '" + method + "'");
      },
      py::arg("tree"), py::arg("method") = "bdd", py::arg("node_cap") = Bdd::kDefaultNodeCap);
  m.def("gate_probabilities", [](const FaultTree& t) {
    const ProbabilityMap p = gate_probabilities(t);
    return std::map<std::string, double>(p.begin(), p.end());
  });
  m.def(
      "minimal_cut_sets",
      [](const FaultTree& t, std::size_t cut_set_cap) {
        QuantLimits limits;
        limits.cut_set_cap = cut_set_cap;
        return minimal_cut_sets(t, limits).sets;
      },
      py::arg("tree"), py::arg("cut_set_cap") = QuantLimits{}.cut_set_cap);
  m.def("brute_force_mcs", [](const FaultTree& t) { return brute_force_mcs(t).sets; });
  m.def("is_cut_set", [](const FaultTree& t, const std::vector<std::string>& ids) {
    return is_cut_set(t, std::set<std::string, std::less<>>(ids.begin(), ids.end()));
  });
  m.def("vertex_reward",
        [](double prescribed, double truth, const std::string& mode, double eps_rel) {
          return vertex_reward(prescribed, truth, make_mode(mode, eps_rel));
        },
        py::arg("prescribed"), py::arg("truth"), py::arg("mode") = "symmetric",
        py::arg("eps_rel") = 1e-6);

  py::class_<VertexQuantEnv>(m, "VertexQuantEnv")
      .def(py::init<>())
      .def(
          "reset_generated",
          [](VertexQuantEnv& env, std::uint64_t seed, int n_basic, int n_gates, double share_prob,
             const std::string& mode) {
            GenConfig c;
            c.n_basic = n_basic;
            c.n_gates = n_gates;
            c.share_prob = share_prob;
            return dump(env.reset(c, seed, make_mode(mode, 1e-6)).to_json());
          },
          py::arg("seed"), py::arg("n_basic") = 6, py::arg("n_gates") = 3,
          py::arg("share_prob") = 0.0, py::arg("mode") = "symmetric")
      .def(
          "reset_tree",
          [](VertexQuantEnv& env, const FaultTree& t, const std::string& mode) {
            return dump(env.reset(t, make_mode(mode, 1e-6)).to_json());
          },
          py::arg("tree"), py::arg("mode") = "symmetric")
      .def("step", [](VertexQuantEnv& env, double p) { return dump(env.step(p).to_json()); })
      .def_property_readonly("done", &VertexQuantEnv::done)
      .def_property_readonly("queries", &VertexQuantEnv::queries);

  py::class_<CutSetEnv>(m, "CutSetEnv")
      .def(py::init<>())
      .def(
          "reset_generated",
          [](CutSetEnv& env, std::uint64_t seed, int n_basic, int n_gates, double share_prob) {
            GenConfig c;
            c.n_basic = n_basic;
            c.n_gates = n_gates;
            c.share_prob = share_prob;
            return dump(env.reset(c, seed).to_json());
          },
          py::arg("seed"), py::arg("n_basic") = 6, py::arg("n_gates") = 3,
          py::arg("share_prob") = 0.0)
      .def(
          "reset_tree",
          [](CutSetEnv& env, const FaultTree& t, std::optional<int> max_steps) {
            return dump(env.reset(t, max_steps).to_json());
          },
          py::arg("tree"), py::arg("max_steps") = py::none())
      .def(
          "step",
          [](CutSetEnv& env, const std::string& type, const std::string& a, const std::string& b) {
            return dump(env.step(make_action(type, a, b)).to_json());
          },
          py::arg("type"), py::arg("a") = "", py::arg("b") = "")
      .def_property_readonly("done", &CutSetEnv::done)
      .def("connected_basic_events", &CutSetEnv::connected_basic_events);

  py::class_<Server>(m, "Server")
      .def(py::init([](std::size_t max_sessions, std::uint64_t token_seed) {
             ServerOptions options;
             options.max_sessions = max_sessions;
             options.token_seed = token_seed;
             return std::make_unique<Server>(options);
           }),
           py::arg("max_sessions") = 64, py::arg("token_seed") = ServerOptions{}.token_seed)
      .def("handle_line", &Server::handle_line, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("session_count", &Server::session_count);
}
