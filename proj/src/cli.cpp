#include "fcgec/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "fcgec/corpus.hpp"
#include "fcgec/error.hpp"
#include "fcgec/http.hpp"
#include "fcgec/metrics.hpp"
#include "fcgec/min_edit.hpp"
#include "fcgec/service.hpp"
#include "fcgec/stg.hpp"

namespace fcgec {

namespace {

using corpus::Json;

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<CorrectionInstance> load_all(const std::vector<std::string>& files, corpus::ParseMode mode,
                                         std::ostream& err) {
  std::vector<CorrectionInstance> all;
  for (const auto& f : files) {
    auto parsed = corpus::parse_corpus_file(f, mode);
    for (const auto& fail : parsed.failures) err << f << ": " << fail.field_path << ": " << fail.message << '\n';
    for (auto& inst : parsed.instances) all.push_back(std::move(inst));
  }
  return all;
}

// A sentence without references realizes itself.
std::vector<Reference> references_or_identity(const CorrectionInstance& inst) {
  if (inst.references.empty()) return {Reference{}};
  return inst.references;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw Error(Errc::NotFound, "cannot write " + path);
    }
    stream_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operation-level Chinese grammatical error correction toolkit", "fcgec"};
  app.require_subcommand(1);

  bool lenient = false;
  bool strict = false;
  std::vector<std::string> files;

  auto* validate = app.add_subcommand("validate", "Check corpus files against the schema and operation rules");
  validate->add_option("corpus", files, "Corpus JSON files")->required()->check(CLI::ExistingFile);
  validate->add_flag("--strict", strict, "Also flag switches combined with positional edits");
  validate->add_flag("--lenient", lenient, "Skip malformed records instead of stopping");

  bool dedupe = false;
  std::string unit = "item";
  std::string format = "text";
  std::size_t t_max = stg::kDefaultMaxInsert;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("corpus", files, "Corpus JSON files, counted together")->required()->check(CLI::ExistingFile);
  stats->add_flag("--dedupe", dedupe, "Collapse identical references within a sentence");
  stats->add_option("--unit", unit, "Operation counting unit")->check(CLI::IsMember({"item", "reference"}));
  stats->add_option("--format", format)->check(CLI::IsMember({"text", "records"}));
  stats->add_option("--t-max", t_max, "Insertion bound for tag coverage")->check(CLI::Range(1, 64));

  std::string src, tgt, batch;
  auto* derive = app.add_subcommand("derive", "Minimal operations turning a source into a target");
  auto* src_opt = derive->add_option("--src", src);
  auto* tgt_opt = derive->add_option("--tgt", tgt);
  auto* batch_opt = derive->add_option("--batch", batch, "TSV of source<TAB>target")->check(CLI::ExistingFile);
  src_opt->needs(tgt_opt)->excludes(batch_opt);
  tgt_opt->needs(src_opt);

  std::string out_path;
  auto* normalize = app.add_subcommand("normalize", "Rewrite every reference in minimal form");
  normalize->add_option("corpus", files)->required()->check(CLI::ExistingFile);
  normalize->add_option("--out", out_path, "Output corpus file (default stdout)");

  bool all_refs = false;
  auto* encode = app.add_subcommand("encode-stg", "Pointer, tag and fill labels as JSON lines");
  encode->add_option("corpus", files)->required()->check(CLI::ExistingFile);
  encode->add_option("--out", out_path, "Label file (default stdout)");
  encode->add_option("--t-max", t_max)->check(CLI::Range(1, 64));
  encode->add_flag("--all-refs", all_refs, "One record per reference instead of the first only");

  std::string labels;
  auto* decode = app.add_subcommand("decode-stg", "Apply label records to source sentences");
  decode->add_option("--src", src, "Corpus JSON or one sentence per line")->required()->check(CLI::ExistingFile);
  decode->add_option("--labels", labels, "JSON lines from encode-stg")->required()->check(CLI::ExistingFile);

  std::string corpus_path, hyp_path;
  auto* eval = app.add_subcommand("eval", "Exact match and char-level F0.5 against corpus references");
  eval->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--hyp", hyp_path, "One hypothesis per line, optionally source<TAB>hypothesis")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--format", format)->check(CLI::IsMember({"text", "records"}));

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  std::size_t replicas = 2;
  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", host);
  serve->add_option("--data", data_dir, "Data directory; corpus.json there is imported on start");
  serve->add_option("--replicas", replicas, "Annotators per task")->check(CLI::Range(2, 4));

  std::vector<std::string> argv_store{"fcgec"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      auto instances = load_all(files, lenient ? corpus::ParseMode::Lenient : corpus::ParseMode::Strict, err);
      const auto report = corpus::validate_corpus(instances, ValidationOptions{strict});
      for (const auto& issue : report.issues) {
        out << (issue.severity == corpus::Severity::Error ? "error" : "note") << '\t' << issue.id << '\t'
            << issue.field_path << '\t' << issue.message << '\n';
      }
      out << "checked " << report.checked << ", with errors " << report.with_errors << '\n';
      return report.clean() ? 0 : 1;
    }

    if (*stats) {
      const auto instances = load_all(files, corpus::ParseMode::Strict, err);
      corpus::StatsOptions options;
      options.dedupe = dedupe;
      options.unit = unit == "item" ? corpus::OpCountUnit::PerItem : corpus::OpCountUnit::PerReference;
      const auto st = corpus::compute_stats(instances, options);
      const auto cov = corpus::tag_coverage(instances, t_max);
      if (format == "records") {
        Json rec = corpus::stats_record(st);
        rec["tag_coverage"] = {{"t_max", t_max}, {"items", cov.items}, {"encodable", cov.encodable}};
        out << rec.dump() << '\n';
      } else {
        out << corpus::stats_text(st);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-22s %zu/%zu (%s%%)\n", "tag coverage", cov.encodable, cov.items,
                      pct(cov.fraction()).c_str());
        out << buf;
      }
      return 0;
    }

    if (*derive) {
      if (src_opt->count()) {
        out << corpus::reference_to_string(derive_operations(Sentence::from_utf8(src), Sentence::from_utf8(tgt)))
            << '\n';
        return 0;
      }
      if (!batch_opt->count()) {
        err << "derive: give --src and --tgt, or --batch\n";
        return 2;
      }
      const auto lines = read_lines(batch);
      for (std::size_t k = 0; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        const auto tab = lines[k].find('\t');
        if (tab == std::string::npos || lines[k].find('\t', tab + 1) != std::string::npos) {
          throw Error(Errc::SchemaError, batch + ":" + std::to_string(k + 1) + ": expected two tab-separated columns");
        }
        const auto s = Sentence::from_utf8(std::string_view(lines[k]).substr(0, tab));
        const auto t = Sentence::from_utf8(std::string_view(lines[k]).substr(tab + 1));
        out << corpus::reference_to_string(derive_operations(s, t)) << '\n';
      }
      return 0;
    }

    if (*normalize) {
      auto instances = load_all(files, corpus::ParseMode::Strict, err);
      for (auto& inst : instances) {
        for (auto& r : inst.references) {
          auto v = validate_reference(inst.sentence, r);
          if (!v.empty()) {
            throw Error(Errc::InvalidReference, inst.id + ": " + v.front().message, inst.id + "." + v.front().field_path);
          }
          r = normalize_reference(inst.sentence, r);
        }
      }
      Output o(out_path, out);
      o.get() << corpus::serialize_corpus(instances) << '\n';
      return 0;
    }

    if (*encode) {
      const auto instances = load_all(files, corpus::ParseMode::Strict, err);
      Output o(out_path, out);
      std::size_t written = 0, skipped = 0;
      for (const auto& inst : instances) {
        const auto refs = references_or_identity(inst);
        const std::size_t count = all_refs ? refs.size() : 1;
        for (std::size_t k = 0; k < count; ++k) {
          try {
            const auto lab = stg::encode_instance(inst.sentence, refs[k], t_max);
            o.get() << corpus::stg_record(inst.id, k, lab).dump() << '\n';
            ++written;
          } catch (const Error& e) {
            if (e.code() != Errc::InsertionTooLong) throw;
            err << inst.id << " ref " << k << ": " << e.what() << '\n';
            ++skipped;
          }
        }
      }
      err << "encoded " << written << ", skipped " << skipped << '\n';
      return 0;
    }

    if (*decode) {
      const std::string text = read_text(src);
      std::map<std::string, Sentence> by_id;
      std::vector<Sentence> by_line;
      const auto first = text.find_first_not_of(" \t\r\n");
      if (first != std::string::npos && text[first] == '{') {
        for (auto& inst : corpus::parse_corpus(text).instances) {
          by_line.push_back(inst.sentence);
          by_id.emplace(inst.id, std::move(inst.sentence));
        }
      } else {
        for (const auto& line : read_lines(src)) by_line.push_back(Sentence::from_utf8(line));
      }
      const auto label_lines = read_lines(labels);
      std::size_t row = 0;
      for (std::size_t k = 0; k < label_lines.size(); ++k) {
        if (label_lines[k].empty()) continue;
        Json rec = Json::parse(label_lines[k], nullptr, false);
        if (rec.is_discarded()) throw Error(Errc::SchemaError, labels + ":" + std::to_string(k + 1) + ": not JSON");
        const Sentence* source = nullptr;
        if (!by_id.empty() && rec.contains("id")) {
          auto it = by_id.find(rec["id"].get<std::string>());
          if (it == by_id.end()) throw Error(Errc::NotFound, "no sentence with id " + rec["id"].get<std::string>(), "id");
          source = &it->second;
        } else {
          if (row >= by_line.size()) throw Error(Errc::LengthMismatch, "more label records than source sentences");
          source = &by_line[row];
        }
        ++row;
        out << stg::decode_instance(*source, corpus::stg_from_json(rec)).utf8() << '\n';
      }
      return 0;
    }

    if (*eval) {
      const auto instances = corpus::parse_corpus_file(corpus_path).instances;
      const auto lines = read_lines(hyp_path);
      std::vector<std::string> hyps;
      for (const auto& l : lines) hyps.push_back(l);
      while (!hyps.empty() && hyps.back().empty() && hyps.size() > instances.size()) hyps.pop_back();
      if (hyps.size() != instances.size()) {
        throw Error(Errc::LengthMismatch, std::to_string(hyps.size()) + " hypotheses for " +
                                              std::to_string(instances.size()) + " sentences");
      }
      std::vector<metrics::EvalRow> rows;
      for (std::size_t k = 0; k < instances.size(); ++k) {
        std::string_view hyp = hyps[k];
        const auto tab = hyp.find('\t');
        if (tab != std::string_view::npos) {
          if (Sentence::from_utf8(hyp.substr(0, tab)) != instances[k].sentence) {
            throw Error(Errc::LengthMismatch, hyp_path + ":" + std::to_string(k + 1) + ": source does not match " +
                                                  instances[k].id);
          }
          hyp = hyp.substr(tab + 1);
        }
        rows.push_back({instances[k].sentence, Sentence::from_utf8(hyp), references_or_identity(instances[k]),
                        instances[k].error_types});
      }
      const auto report = metrics::evaluate_corpus(rows);
      auto line_of = [&](const std::string& name, const metrics::AggregateScores& a) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-8s rows %-6zu EM %6s  P %s  R %s  F0.5 %s\n", name.c_str(), a.rows,
                      pct(a.exact_match()).c_str(), fixed4(a.precision()).c_str(), fixed4(a.recall()).c_str(),
                      fixed4(a.f_half()).c_str());
        return std::string(buf);
      };
      auto record_of = [](const metrics::AggregateScores& a) {
        return Json{{"rows", a.rows},         {"exact_match", a.exact_match()}, {"precision", a.precision()},
                    {"recall", a.recall()},   {"f_half", a.f_half()},           {"tp", a.counts.tp},
                    {"hyp_edits", a.counts.hyp_count}, {"ref_edits", a.counts.ref_count}};
      };
      if (format == "records") {
        Json rec{{"overall", record_of(report.overall)}};
        Json types = Json::object();
        for (const auto& [t, a] : report.by_type) types[std::string(to_string(t))] = record_of(a);
        rec["by_type"] = std::move(types);
        out << rec.dump() << '\n';
      } else {
        out << line_of("overall", report.overall);
        for (const auto& [t, a] : report.by_type) out << line_of(std::string(to_string(t)), a);
      }
      return 0;
    }

    if (*serve) {
      service::ServiceConfig config;
      config.replicas = replicas;
      std::unique_ptr<service::AnnotationStore> store;
      if (data_dir.empty()) {
        store = std::make_unique<service::AnnotationStore>(config);
      } else {
        store = std::make_unique<service::AnnotationStore>(std::filesystem::path(data_dir), config);
        const auto seed = std::filesystem::path(data_dir) / "corpus.json";
        if (std::filesystem::exists(seed)) {
          const auto added = store->import(corpus::parse_corpus_file(seed).instances);
          err << "imported " << added << " new tasks from " << seed.string() << '\n';
        }
      }
      err << "listening on " << host << ':' << port << '\n';
      if (!service::serve(*store, host, port)) {
        err << "cannot listen on " << host << ':' << port << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what();
    if (!e.field_path().empty()) err << " (" << e.field_path() << ')';
    err << '\n';
    return 1;
  }
  return 2;
}

}  // namespace fcgec
