#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcgec/corpus.hpp"
#include "fcgec/error.hpp"
#include "fcgec/metrics.hpp"
#include "fcgec/min_edit.hpp"
#include "fcgec/stg.hpp"

namespace py = pybind11;
using namespace fcgec;
using corpus::Json;

namespace {

// References cross the boundary as compact json text; the python wrapper
// converts to and from dicts.
Reference ref_of(const std::string& json) { return corpus::parse_reference(json); }
std::string text_of(const Reference& r) { return corpus::reference_to_string(r); }

std::vector<Reference> refs_of(const std::vector<std::string>& items) {
  std::vector<Reference> out;
  for (const auto& s : items) out.push_back(ref_of(s));
  return out;
}

stg::Matrix matrix_of(const std::vector<std::vector<double>>& rows) {
  stg::Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw Error(Errc::DimensionMismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_fcgec, m) {
  m.doc() = "Operation-level Chinese grammatical error correction core";

  static py::exception<Error> error(m, "FcgecError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(errc_name(e.code())), std::string(e.what()), e.field_path());
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def("apply_reference", [](const std::string& s, const std::string& r) {
    return apply_reference(Sentence::from_utf8(s), ref_of(r)).utf8();
  });
  m.def(
      "validate_reference",
      [](const std::string& s, const std::string& r, bool strict) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& v : validate_reference(Sentence::from_utf8(s), ref_of(r), {strict}))
          out.emplace_back(std::string(to_string(v.kind)), v.field_path, v.message);
        return out;
      },
      py::arg("sentence"), py::arg("reference"), py::arg("strict") = false);
  m.def("op_count", [](const std::string& r) { return op_count(ref_of(r)); });
  m.def("derive_operations", [](const std::string& s, const std::string& t) {
    return text_of(derive_operations(Sentence::from_utf8(s), Sentence::from_utf8(t)));
  });
  m.def("normalize_reference", [](const std::string& s, const std::string& r) {
    return text_of(normalize_reference(Sentence::from_utf8(s), ref_of(r)));
  });

  m.def(
      "encode_stg",
      [](const std::string& s, const std::string& r, std::size_t t_max) {
        return corpus::stg_record("", 0, stg::encode_instance(Sentence::from_utf8(s), ref_of(r), t_max)).dump();
      },
      py::arg("sentence"), py::arg("reference"), py::arg("t_max") = stg::kDefaultMaxInsert);
  m.def("decode_stg", [](const std::string& s, const std::string& labels) {
    return stg::decode_instance(Sentence::from_utf8(s), corpus::stg_from_json(Json::parse(labels))).utf8();
  });
  m.def("attention_scores", [](const std::vector<std::vector<double>>& q, const std::vector<std::vector<double>>& k) {
    const auto a = stg::attention_scores(matrix_of(q), matrix_of(k));
    std::vector<std::vector<double>> out(a.rows, std::vector<double>(a.cols));
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < a.cols; ++j) out[i][j] = a(i, j);
    return out;
  });
  m.def(
      "beam_decode",
      [](const std::vector<std::vector<double>>& scores, std::size_t beam) {
        const auto r = stg::beam_decode_permutation(stg::ScoreMatrix(matrix_of(scores)), beam);
        return std::make_pair(r.order, r.score);
      },
      py::arg("scores"), py::arg("beam") = stg::kDefaultBeamWidth);
  m.def("exhaustive_beam_width", &stg::exhaustive_beam_width);

  m.def("extract_edits", [](const std::string& src, const std::string& tgt) {
    std::vector<std::tuple<std::string, std::size_t, std::size_t, std::string>> out;
    for (const auto& e : metrics::extract_edits(Sentence::from_utf8(src), Sentence::from_utf8(tgt)))
      out.emplace_back(std::string(metrics::to_string(e.kind)), e.begin, e.end, encode_utf8(e.replacement));
    return out;
  });
  m.def("evaluate", [](const std::string& src, const std::string& hyp, const std::vector<std::string>& refs) {
    const auto s = metrics::evaluate_instance(Sentence::from_utf8(src), Sentence::from_utf8(hyp), refs_of(refs));
    py::dict d;
    d["precision"] = s.precision;
    d["recall"] = s.recall;
    d["f_half"] = s.f_half;
    d["exact_match"] = s.exact_match;
    d["best_reference"] = s.best_reference;
    return d;
  });
  m.def("f_half", &metrics::f_half);

  m.def(
      "corpus_stats",
      [](const std::vector<std::string>& files, bool dedupe, bool per_reference) {
        std::vector<CorrectionInstance> all;
        for (const auto& f : files)
          for (auto& inst : corpus::parse_corpus_file(f).instances) all.push_back(std::move(inst));
        corpus::StatsOptions options{dedupe, per_reference ? corpus::OpCountUnit::PerReference : corpus::OpCountUnit::PerItem};
        return corpus::stats_record(corpus::compute_stats(all, options)).dump();
      },
      py::arg("files"), py::arg("dedupe") = false, py::arg("per_reference") = false);
  m.def("normalize_corpus", [](const std::string& text) {
    auto instances = corpus::parse_corpus(text).instances;
    return corpus::serialize_corpus(instances);
  });
}
