#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "qvar/arith.hpp"
#include "qvar/harness.hpp"
#include "qvar/kernels.hpp"
#include "qvar/multiplier.hpp"
#include "qvar/varnorm.hpp"

namespace py = pybind11;
using namespace qvar;

namespace {

varnorm::SampledPath to_path(const std::vector<double>& values, const std::vector<double>& times) {
  return times.empty() ? varnorm::SampledPath::scalar(values) : varnorm::SampledPath::scalar(times, values);
}

harness::ExperimentConfig make_config(const std::map<std::string, std::string>& kv) {
  harness::ExperimentConfig cfg;
  for (const auto& [k, v] : kv) harness::set_config_value(cfg, k, v);
  return cfg;
}

std::string as_json(const harness::RunRecord& rec) {
  std::ostringstream os;
  harness::write_json(os, rec);
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_qvar, m) {
  m.attr("__version__") = kVersion;

  m.def("mobius", &arith::mobius_of, py::arg("n"));
  m.def("totient", &arith::totient_of, py::arg("n"));
  m.def("reduced_residues", &arith::reduced_residues, py::arg("q"));
  m.def("ramanujan_sum", &arith::ramanujan_sum, py::arg("q"), py::arg("a"));
  m.def("von_mangoldt_table", [](std::int64_t limit) { return arith::build_tables(limit).von_mangoldt; },
        py::arg("limit"));
  m.def(
      "complete_poly_sum",
      [](std::int64_t q, const std::vector<std::int64_t>& numerators) {
        std::vector<arith::ReducedFraction> c;
        for (auto a : numerators) c.push_back(arith::ReducedFraction::normalized(a, q));
        const arith::FreqPoint th(c);
        return arith::complete_poly_sum(th.height(), th, static_cast<int>(c.size()));
      },
      py::arg("q"), py::arg("numerators"));

  m.def("hvar", [](const std::vector<double>& v, double q, const std::vector<double>& t) { return varnorm::hvar(to_path(v, t), q); },
        py::arg("values"), py::arg("q"), py::arg("times") = std::vector<double>{});
  m.def("ivar", [](const std::vector<double>& v, double q, const std::vector<double>& t) { return varnorm::ivar(to_path(v, t), q); },
        py::arg("values"), py::arg("q"), py::arg("times") = std::vector<double>{});
  m.def("greedy_jump_count",
        [](const std::vector<double>& v, double lam) { return varnorm::greedy_jump_count(varnorm::SampledPath::scalar(v), lam); },
        py::arg("values"), py::arg("lam"));
  m.def("lazy_jump_count",
        [](const std::vector<double>& v, double lam) { return varnorm::lazy_jump_count(varnorm::SampledPath::scalar(v), lam); },
        py::arg("values"), py::arg("lam"));
  m.def("time_grid", [](double eps, std::int64_t n_max) { return varnorm::make_time_grid_until(eps, n_max).points; },
        py::arg("epsilon"), py::arg("n_max"));

  m.def(
      "prime_kernel_ft",
      [](std::int64_t N, double alpha) {
        const auto K = kernels::prime_kernel(N, arith::build_tables(N));
        return kernels::kernel_ft(K, {&alpha, 1});
      },
      py::arg("N"), py::arg("alpha"));
  m.def(
      "poly_kernel_ft",
      [](std::int64_t N, int d, const std::vector<double>& alpha) {
        return kernels::kernel_ft(kernels::poly_kernel(N, d), alpha);
      },
      py::arg("N"), py::arg("d"), py::arg("alpha"));
  m.def("cm_ft", [](double t, const std::vector<double>& beta) { return kernels::cm_ft(t, beta, static_cast<int>(beta.size())); },
        py::arg("t"), py::arg("beta"));

  m.def(
      "classify_arc",
      [](const std::vector<double>& alpha, std::int64_t N) {
        const auto r = mult::classify_arc(alpha, N, static_cast<int>(alpha.size()));
        py::dict out;
        out["major"] = r.major;
        out["q"] = r.q;
        py::list theta;
        if (r.major)
          for (const auto& f : r.theta.coords()) theta.append(py::make_tuple(f.num(), f.den()));
        out["theta"] = theta;
        out["beta"] = r.beta;
        return out;
      },
      py::arg("alpha"), py::arg("N"));

  m.def("_verify_arith", [](const std::map<std::string, std::string>& kv) { return as_json(harness::verify_arith(make_config(kv))); });
  m.def("_approx_scan", [](const std::map<std::string, std::string>& kv) { return as_json(harness::approx_error_scan(make_config(kv))); });
  m.def("_variation_scan", [](const std::map<std::string, std::string>& kv) { return as_json(harness::variation_ratio_scan(make_config(kv))); });
  m.def("_multifreq_scan", [](const std::map<std::string, std::string>& kv) { return as_json(harness::multifreq_constant_scan(make_config(kv))); });
}
