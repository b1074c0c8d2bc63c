#include "fcgec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fcgec/error.hpp"

namespace fcgec::corpus {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& message) {
  throw Error(Errc::SchemaError, where + ": " + message, where);
}

std::size_t as_index(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema_error(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::size_t> as_index_list(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of indices");
  std::vector<std::size_t> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_index(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Chars as_label(const Json& j, const std::string& where) {
  if (j.is_string()) return decode_utf8(j.get<std::string>());
  if (!j.is_array()) schema_error(where, "expected a string or an array of strings");
  Chars out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_string()) schema_error(where + "[" + std::to_string(k) + "]", "expected a string");
    out += decode_utf8(j[k].get<std::string>());
  }
  return out;
}

Json label_to_json(const Chars& label) {
  Json arr = Json::array();
  for (char32_t c : label) arr.push_back(encode_utf8(CharsView(&c, 1)));
  return arr;
}

// "INS_3" -> 3
std::size_t tag_count(const Json& j, std::string_view prefix, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a tag string");
  const auto text = j.get<std::string>();
  if (text.rfind(prefix, 0) != 0) schema_error(where, "expected tag " + std::string(prefix) + "k, got " + text);
  std::size_t value = 0;
  const char* begin = text.data() + prefix.size();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) schema_error(where, "bad count in tag " + text);
  return value;
}

std::vector<ErrorType> parse_types(const Json& j, const std::string& where) {
  std::vector<std::string> names;
  if (j.is_null()) return {};
  if (j.is_string()) {
    std::string token;
    for (char c : j.get<std::string>() + ";") {
      if (c == ';' || c == ',' || c == ' ') {
        if (!token.empty() && token != "*") names.push_back(token);
        token.clear();
      } else {
        token.push_back(c);
      }
    }
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_string()) schema_error(where + "[" + std::to_string(k) + "]", "expected a string");
      names.push_back(j[k].get<std::string>());
    }
  } else {
    schema_error(where, "expected a string or an array of strings");
  }
  std::set<ErrorType> types;
  for (const auto& name : names) {
    auto t = parse_error_type(name);
    if (!t) schema_error(where, "unknown error type '" + name + "'");
    types.insert(*t);
  }
  return {types.begin(), types.end()};
}

CorrectionInstance parse_record(const std::string& id, const Json& rec) {
  if (!rec.is_object()) schema_error(id, "record is not an object");
  CorrectionInstance inst;
  inst.id = id;

  auto field = [&](const char* name) -> const Json* {
    auto it = rec.find(name);
    return it == rec.end() ? nullptr : &*it;
  };
  const Json* sentence = field("sentence");
  if (!sentence || !sentence->is_string()) schema_error(id + ".sentence", "missing or not a string");
  try {
    inst.sentence = Sentence::from_utf8(sentence->get<std::string>());
  } catch (const Error& e) {
    schema_error(id + ".sentence", e.what());
  }
  if (inst.sentence.empty()) schema_error(id + ".sentence", "empty sentence");

  const Json* flag = field("error_flag");
  if (!flag) schema_error(id + ".error_flag", "missing");
  if (flag->is_boolean())
    inst.error_flag = flag->get<bool>();
  else if (flag->is_number_integer() && (flag->get<int>() == 0 || flag->get<int>() == 1))
    inst.error_flag = flag->get<int>() == 1;
  else
    schema_error(id + ".error_flag", "expected a boolean or 0/1");

  if (const Json* types = field("error_type")) inst.error_types = parse_types(*types, id + ".error_type");

  if (const Json* ops = field("operation")) {
    Json list = *ops;
    if (list.is_string()) {
      const auto text = list.get<std::string>();
      list = text.empty() ? Json::array() : Json::parse(text, nullptr, false);
      if (list.is_discarded()) schema_error(id + ".operation", "string is not valid JSON");
    }
    if (!list.is_array()) schema_error(id + ".operation", "expected an array of references");
    for (std::size_t k = 0; k < list.size(); ++k) {
      inst.references.push_back(reference_from_json(list[k], id + ".operation[" + std::to_string(k) + "]"));
    }
  }
  if (const Json* ext = field("external")) inst.external = ext->dump();

  for (const auto& known : rec.items()) {
    static const std::set<std::string> kFields{"sentence", "error_flag", "error_type", "operation", "external"};
    if (!kFields.count(known.key())) schema_error(id + "." + known.key(), "unknown field");
  }
  return inst;
}

}  // namespace

Reference reference_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "reference must be an object");
  Reference r;
  for (const auto& [key, value] : j.items()) {
    const std::string at = where + "." + key;
    if (key == "Switch") {
      r.switch_op = Switch{as_index_list(value, at)};
    } else if (key == "Delete") {
      r.deletes = as_index_list(value, at);
    } else if (key == "Insert" || key == "Modify") {
      if (!value.is_array()) schema_error(at, "expected an array of items");
      for (std::size_t k = 0; k < value.size(); ++k) {
        const std::string item_at = at + "[" + std::to_string(k) + "]";
        const Json& item = value[k];
        if (!item.is_object() || !item.contains("pos") || !item.contains("label")) {
          schema_error(item_at, "item needs pos and label");
        }
        const std::size_t pos = as_index(item["pos"], item_at + ".pos");
        Chars label = as_label(item["label"], item_at + ".label");
        if (key == "Insert") {
          std::size_t count = item.contains("tag") ? tag_count(item["tag"], "INS_", item_at + ".tag") : label.size();
          if (count != label.size()) {
            schema_error(item_at, "tag INS_" + std::to_string(count) + " but " + std::to_string(label.size()) +
                                      " label characters");
          }
          r.inserts.push_back({pos, count, std::move(label)});
        } else {
          std::size_t span = item.contains("tag") ? tag_count(item["tag"], "MOD_", item_at + ".tag") : 1;
          if (label.empty()) schema_error(item_at + ".label", "empty modify label");
          r.modifies.push_back({pos, span, std::move(label)});
        }
      }
    } else {
      schema_error(at, "unknown operation");
    }
  }
  return r;
}

Json reference_to_json(const Reference& r) {
  Json j = Json::object();
  if (r.switch_op) j["Switch"] = r.switch_op->order;
  if (!r.deletes.empty()) j["Delete"] = r.deletes;
  if (!r.inserts.empty()) {
    Json items = Json::array();
    for (const auto& ins : r.inserts) {
      items.push_back({{"pos", ins.pos}, {"tag", "INS_" + std::to_string(ins.count)}, {"label", label_to_json(ins.label)}});
    }
    j["Insert"] = std::move(items);
  }
  if (!r.modifies.empty()) {
    Json items = Json::array();
    for (const auto& m : r.modifies) {
      items.push_back({{"pos", m.pos}, {"tag", "MOD_" + std::to_string(m.span)}, {"label", label_to_json(m.label)}});
    }
    j["Modify"] = std::move(items);
  }
  return j;
}

std::string reference_to_string(const Reference& r) {
  return reference_to_json(r).dump(-1, ' ', false, Json::error_handler_t::strict);
}

Reference parse_reference(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) schema_error("operation", "not valid JSON");
  return reference_from_json(j);
}

ParseResult parse_corpus(std::string_view text, ParseMode mode) {
  Json root = Json::parse(text, nullptr, false);
  if (root.is_discarded()) throw Error(Errc::SchemaError, "corpus is not valid JSON", "$");
  if (!root.is_object()) throw Error(Errc::SchemaError, "corpus must map ids to records", "$");
  ParseResult result;
  result.instances.reserve(root.size());
  for (const auto& [id, rec] : root.items()) {
    try {
      result.instances.push_back(parse_record(id, rec));
    } catch (const Error& e) {
      if (mode == ParseMode::Strict) throw;
      result.failures.push_back({id, e.field_path(), e.what()});
    }
  }
  return result;
}

ParseResult parse_corpus_file(const std::filesystem::path& file, ParseMode mode) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), mode);
}

CorrectionInstance instance_from_json(const std::string& id, const Json& record) {
  return parse_record(id, record);
}

Json instance_to_json(const CorrectionInstance& inst) {
  Json rec = Json::object();
  rec["sentence"] = inst.sentence.utf8();
  rec["error_flag"] = inst.error_flag ? 1 : 0;
  Json types = Json::array();
  for (ErrorType t : inst.error_types) types.push_back(std::string(to_string(t)));
  rec["error_type"] = std::move(types);
  Json ops = Json::array();
  for (const auto& r : inst.references) ops.push_back(reference_to_json(r));
  rec["operation"] = std::move(ops);
  if (!inst.external.empty()) rec["external"] = Json::parse(inst.external);
  return rec;
}

std::string serialize_corpus(const std::vector<CorrectionInstance>& instances, int indent) {
  Json root = Json::object();
  for (const auto& inst : instances) root[inst.id] = instance_to_json(inst);
  return root.dump(indent) + "\n";
}

CorpusReport validate_corpus(const std::vector<CorrectionInstance>& instances, ValidationOptions options) {
  CorpusReport report;
  for (const auto& inst : instances) {
    ++report.checked;
    const std::size_t before = std::count_if(report.issues.begin(), report.issues.end(),
                                             [](const Issue& i) { return i.severity == Severity::Error; });
    auto add = [&](Severity sev, std::string path, std::string message) {
      report.issues.push_back({sev, inst.id, std::move(path), std::move(message)});
    };
    for (std::size_t k = 0; k < inst.references.size(); ++k) {
      const std::string where = "operation[" + std::to_string(k) + "]";
      for (const auto& v : validate_reference(inst.sentence, inst.references[k], options)) {
        add(Severity::Error, where + "." + v.field_path, v.message);
      }
      for (std::size_t prev = 0; prev < k; ++prev) {
        if (inst.references[prev] == inst.references[k]) {
          add(Severity::Note, where, "duplicate of operation[" + std::to_string(prev) + "], collapsed");
          break;
        }
      }
    }
    const bool nonempty = inst.has_nonempty_reference();
    if (inst.error_flag && !nonempty) add(Severity::Error, "error_flag", "error_flag set but no non-empty reference");
    if (!inst.error_flag && nonempty) add(Severity::Error, "error_flag", "error_flag clear but a reference edits the sentence");
    if (inst.error_flag && inst.error_types.empty()) add(Severity::Error, "error_type", "erroneous sentence without error type");
    if (!inst.error_flag && !inst.error_types.empty()) add(Severity::Error, "error_type", "correct sentence carries error types");
    const std::size_t after = std::count_if(report.issues.begin(), report.issues.end(),
                                            [](const Issue& i) { return i.severity == Severity::Error; });
    if (after > before) ++report.with_errors;
  }
  return report;
}

CorpusStats compute_stats(const std::vector<CorrectionInstance>& instances, StatsOptions options) {
  if (instances.empty()) throw Error(Errc::EmptyInput, "no instances");
  CorpusStats st;
  st.sentences = instances.size();
  st.len_min = instances.front().sentence.size();
  std::size_t total_len = 0;
  std::map<ErrorType, std::size_t> type_counts;
  std::size_t type_total = 0;
  std::size_t ref_total = 0;

  for (const auto& inst : instances) {
    const std::size_t len = inst.sentence.size();
    total_len += len;
    st.len_min = std::min(st.len_min, len);
    st.len_max = std::max(st.len_max, len);

    std::vector<const Reference*> refs;
    for (const auto& r : inst.references) {
      if (r.empty()) continue;
      if (options.dedupe &&
          std::any_of(refs.begin(), refs.end(), [&](const Reference* seen) { return *seen == r; }))
        continue;
      refs.push_back(&r);
    }
    for (const Reference* r : refs) {
      const bool has_switch = r->switch_op && !r->switch_op->is_identity();
      if (options.unit == OpCountUnit::PerItem) {
        st.ops.switch_ops += has_switch ? 1 : 0;
        st.ops.delete_ops += r->deletes.size();
        st.ops.insert_ops += r->inserts.size();
        st.ops.modify_ops += r->modifies.size();
      } else {
        st.ops.switch_ops += has_switch ? 1 : 0;
        st.ops.delete_ops += r->deletes.empty() ? 0 : 1;
        st.ops.insert_ops += r->inserts.empty() ? 0 : 1;
        st.ops.modify_ops += r->modifies.empty() ? 0 : 1;
      }
    }

    if (inst.error_flag) {
      ++st.erroneous;
      if (st.ref_hist.size() <= refs.size()) st.ref_hist.resize(refs.size() + 1, 0);
      ++st.ref_hist[refs.size()];
      ref_total += refs.size();
      for (ErrorType t : inst.error_types) {
        ++type_counts[t];
        ++type_total;
      }
    }
  }
  st.len_mean = static_cast<double>(total_len) / static_cast<double>(st.sentences);
  st.mean_refs = st.erroneous ? static_cast<double>(ref_total) / static_cast<double>(st.erroneous) : 0.0;
  for (ErrorType t : kAllErrorTypes) {
    st.type_pct[t] = type_total ? 100.0 * static_cast<double>(type_counts[t]) / static_cast<double>(type_total) : 0.0;
  }
  return st;
}

std::string stats_text(const CorpusStats& st) {
  std::ostringstream out;
  char buf[128];
  auto row = [&](const char* label, const std::string& value) {
    std::snprintf(buf, sizeof buf, "%-22s %s\n", label, value.c_str());
    out << buf;
  };
  auto fixed = [&](double v, int digits) {
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return std::string(buf);
  };
  row("sentences", std::to_string(st.sentences));
  row("erroneous", std::to_string(st.erroneous));
  row("switch", std::to_string(st.ops.switch_ops));
  row("delete", std::to_string(st.ops.delete_ops));
  row("insert", std::to_string(st.ops.insert_ops));
  row("modify", std::to_string(st.ops.modify_ops));
  for (const auto& [t, pct] : st.type_pct) row(("type % " + std::string(to_string(t))).c_str(), fixed(pct, 2));
  row("length min", std::to_string(st.len_min));
  row("length max", std::to_string(st.len_max));
  row("length mean", fixed(st.len_mean, 2));
  row("mean refs", fixed(st.mean_refs, 3));
  std::string hist;
  for (std::size_t k = 0; k < st.ref_hist.size(); ++k) {
    if (!hist.empty()) hist += " ";
    hist += std::to_string(k) + ":" + std::to_string(st.ref_hist[k]);
  }
  row("refs histogram", hist);
  return out.str();
}

Json stats_record(const CorpusStats& st) {
  Json j = Json::object();
  j["sentences"] = st.sentences;
  j["erroneous"] = st.erroneous;
  j["switch"] = st.ops.switch_ops;
  j["delete"] = st.ops.delete_ops;
  j["insert"] = st.ops.insert_ops;
  j["modify"] = st.ops.modify_ops;
  Json pct = Json::object();
  for (const auto& [t, v] : st.type_pct) pct[std::string(to_string(t))] = v;
  j["type_pct"] = std::move(pct);
  j["len"] = {{"min", st.len_min}, {"max", st.len_max}, {"mean", st.len_mean}};
  j["ref_hist"] = st.ref_hist;
  j["mean_refs"] = st.mean_refs;
  return j;
}

TagCoverage tag_coverage(const std::vector<CorrectionInstance>& instances, std::size_t max_insert) {
  TagCoverage c;
  for (const auto& inst : instances) {
    for (const auto& r : inst.references) {
      for (const auto& ins : r.inserts) {
        ++c.items;
        if (ins.label.size() <= max_insert) ++c.encodable;
      }
      for (const auto& m : r.modifies) {
        ++c.items;
        if (m.label.size() <= m.span + max_insert) ++c.encodable;
      }
    }
  }
  return c;
}

Json stg_record(const std::string& id, std::size_t ref_index, const stg::StgLabels& labels) {
  Json j = Json::object();
  j["id"] = id;
  j["ref"] = ref_index;
  j["first"] = labels.pointers.first;
  j["next"] = labels.pointers.next;
  Json tags = Json::array();
  for (const auto& t : labels.tags.tags) tags.push_back(t.str());
  j["tags"] = std::move(tags);
  j["fills"] = encode_utf8(labels.tags.fills);
  return j;
}

stg::StgLabels stg_from_json(const Json& j) {
  if (!j.is_object()) schema_error("$", "label record must be an object");
  for (const char* key : {"first", "next", "tags", "fills"}) {
    if (!j.contains(key)) schema_error(std::string("$.") + key, "missing");
  }
  stg::StgLabels labels;
  labels.pointers.first = as_index(j["first"], "$.first");
  labels.pointers.next = as_index_list(j["next"], "$.next");
  if (!j["tags"].is_array()) schema_error("$.tags", "expected an array");
  for (const auto& t : j["tags"]) {
    if (!t.is_string()) schema_error("$.tags", "expected tag strings");
    labels.tags.tags.push_back(stg::Tag::parse(t.get<std::string>()));
  }
  if (!j["fills"].is_string()) schema_error("$.fills", "expected a string");
  labels.tags.fills = decode_utf8(j["fills"].get<std::string>());
  return labels;
}

}  // namespace fcgec::corpus
