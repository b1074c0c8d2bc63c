#include "fcgec/service.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "fcgec/error.hpp"
#include "fcgec/min_edit.hpp"

namespace fcgec::service {

namespace {

using Json = corpus::Json;

Json refs_to_json(const std::vector<Reference>& refs) {
  Json arr = Json::array();
  for (const auto& r : refs) arr.push_back(corpus::reference_to_json(r));
  return arr;
}

std::vector<Reference> refs_from_json(const Json& arr, const std::string& where) {
  if (!arr.is_array()) throw Error(Errc::SchemaError, where + ": expected an array", where);
  std::vector<Reference> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    out.push_back(corpus::reference_from_json(arr[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

void check_references(const Sentence& s, const std::vector<Reference>& refs) {
  for (std::size_t k = 0; k < refs.size(); ++k) {
    auto v = validate_reference(s, refs[k]);
    if (!v.empty()) {
      throw Error(Errc::InvalidReference, v.front().message,
                  "operation[" + std::to_string(k) + "]." + v.front().field_path);
    }
  }
}

}  // namespace

std::string_view to_string(TaskStatus status) {
  switch (status) {
    case TaskStatus::Open: return "open";
    case TaskStatus::Conflicting: return "conflicting";
    case TaskStatus::Resolved: return "resolved";
  }
  return "?";
}

std::optional<TaskStatus> parse_status(std::string_view text) {
  for (TaskStatus s : {TaskStatus::Open, TaskStatus::Conflicting, TaskStatus::Resolved})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

const Submission* AnnotationTask::submission_of(const std::string& annotator) const {
  for (const auto& s : submissions)
    if (s.annotator == annotator) return &s;
  return nullptr;
}

std::set<Sentence> realized_set(const Sentence& source, const std::vector<Reference>& refs) {
  std::set<Sentence> out;
  for (const auto& r : refs) out.insert(apply_reference(source, r));
  if (out.empty()) out.insert(source);
  return out;
}

AnnotationStore::AnnotationStore(ServiceConfig config) : config_(config) {
  if (config_.replicas < 2 || config_.replicas > 4) {
    throw Error(Errc::PreconditionViolated, "replicas must be between 2 and 4");
  }
}

AnnotationStore::AnnotationStore(std::filesystem::path data_dir, ServiceConfig config)
    : AnnotationStore(config) {
  std::filesystem::create_directories(data_dir);
  dir_ = std::move(data_dir);
  recover();
  log_.open(*dir_ / "events.jsonl", std::ios::app | std::ios::binary);
  if (!log_) throw Error(Errc::NotFound, "cannot open event log in " + dir_->string());
}

void AnnotationStore::recover() {
  const auto snap = *dir_ / "snapshot.json";
  if (std::filesystem::exists(snap)) {
    std::ifstream in(snap, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    Json state = Json::parse(buf.str(), nullptr, false);
    if (state.is_discarded()) throw Error(Errc::SchemaError, "corrupt snapshot " + snap.string());
    load_state(state);
  }
  const auto log_path = *dir_ / "events.jsonl";
  std::ifstream log(log_path, std::ios::binary);
  std::string line;
  std::uintmax_t good = 0;
  bool torn = false;
  while (std::getline(log, line)) {
    Json event = Json::parse(line, nullptr, false);
    if (log.eof() || event.is_discarded()) {
      // a crash mid-append leaves a final line without its newline
      torn = !line.empty();
      break;
    }
    good += line.size() + 1;
    const auto seq = event.at("seq").get<std::uint64_t>();
    if (seq <= seq_) continue;
    apply_event(event);
    seq_ = seq;
  }
  log.close();
  if (torn) std::filesystem::resize_file(log_path, good);
}

void AnnotationStore::persist(Json event) {
  event["seq"] = seq_ + 1;
  if (dir_) {
    log_ << event.dump() << '\n';
    log_.flush();
    if (!log_) throw Error(Errc::Conflict, "failed to append to the event log");
  }
  apply_event(event);
  ++seq_;
  if (dir_ && ++events_since_snapshot_ >= config_.snapshot_every) write_snapshot_locked();
}

void AnnotationStore::apply_event(const Json& event) {
  const auto type = event.at("type").get<std::string>();
  if (type == "import") {
    apply_import(corpus::instance_from_json(event.at("id").get<std::string>(), event.at("record")));
  } else if (type == "assign") {
    apply_assign(event.at("task").get<std::string>(), event.at("annotator").get<std::string>());
  } else if (type == "submit") {
    apply_submit(event.at("task").get<std::string>(), event.at("annotator").get<std::string>(),
                 refs_from_json(event.at("operation"), "operation"));
  } else if (type == "resolve") {
    std::optional<std::vector<ErrorType>> types;
    if (event.contains("error_type")) {
      types.emplace();
      for (const auto& name : event["error_type"]) types->push_back(*parse_error_type(name.get<std::string>()));
    }
    apply_resolve(event.at("task").get<std::string>(), event.at("expert").get<std::string>(),
                  refs_from_json(event.at("operation"), "operation"), std::move(types),
                  event.at("seq").get<std::uint64_t>());
  } else {
    throw Error(Errc::SchemaError, "unknown event type " + type);
  }
}

void AnnotationStore::apply_import(const CorrectionInstance& inst) {
  if (tasks_.count(inst.id)) return;
  AnnotationTask task;
  task.instance = inst;
  tasks_.emplace(inst.id, std::move(task));
  order_.push_back(inst.id);
}

void AnnotationStore::apply_assign(const std::string& id, const std::string& annotator) {
  auto& task = find(id);
  task.annotators.push_back(annotator);
  ++task.revision;
  while (cursor_ < order_.size()) {
    const auto& head = tasks_.at(order_[cursor_]);
    if (head.status == TaskStatus::Open && head.annotators.size() < config_.replicas) break;
    ++cursor_;
  }
}

void AnnotationStore::apply_submit(const std::string& id, const std::string& annotator, std::vector<Reference> refs) {
  auto& task = find(id);
  auto it = std::find_if(task.submissions.begin(), task.submissions.end(),
                         [&](const Submission& s) { return s.annotator == annotator; });
  if (it == task.submissions.end())
    task.submissions.push_back({annotator, std::move(refs)});
  else
    it->references = std::move(refs);
  ++task.revision;
  if (task.status != TaskStatus::Resolved && task.submissions.size() >= 2) {
    const auto first = realized_set(task.instance.sentence, task.submissions.front().references);
    bool agree = std::all_of(task.submissions.begin(), task.submissions.end(), [&](const Submission& s) {
      return realized_set(task.instance.sentence, s.references) == first;
    });
    task.status = agree ? TaskStatus::Open : TaskStatus::Conflicting;
  }
}

void AnnotationStore::apply_resolve(const std::string& id, const std::string& expert, std::vector<Reference> refs,
                                    std::optional<std::vector<ErrorType>> types, std::uint64_t seq) {
  auto& task = find(id);
  task.status = TaskStatus::Resolved;
  task.resolution = refs;
  if (types) task.instance.error_types = std::move(*types);
  task.audit.push_back({seq, expert, std::move(refs)});
  ++task.revision;
}

AnnotationTask& AnnotationStore::find(const std::string& id) {
  auto it = tasks_.find(id);
  if (it == tasks_.end()) throw Error(Errc::NotFound, "no task " + id, "id");
  return it->second;
}

const AnnotationTask& AnnotationStore::find(const std::string& id) const {
  auto it = tasks_.find(id);
  if (it == tasks_.end()) throw Error(Errc::NotFound, "no task " + id, "id");
  return it->second;
}

std::size_t AnnotationStore::import(const std::vector<CorrectionInstance>& instances) {
  std::unique_lock lock(mutex_);
  std::size_t added = 0;
  for (const auto& inst : instances) {
    if (tasks_.count(inst.id)) continue;
    persist({{"type", "import"}, {"id", inst.id}, {"record", corpus::instance_to_json(inst)}});
    ++added;
  }
  return added;
}

std::optional<std::string> AnnotationStore::next_task(const std::string& annotator) {
  std::unique_lock lock(mutex_);
  for (const auto& id : order_) {
    const auto& task = tasks_.at(id);
    if (task.status != TaskStatus::Resolved &&
        std::count(task.annotators.begin(), task.annotators.end(), annotator) && !task.submission_of(annotator))
      return id;
  }
  for (std::size_t k = cursor_; k < order_.size(); ++k) {
    const auto& id = order_[k];
    const auto& task = tasks_.at(id);
    if (task.status != TaskStatus::Open || task.annotators.size() >= config_.replicas) continue;
    if (std::count(task.annotators.begin(), task.annotators.end(), annotator)) continue;
    persist({{"type", "assign"}, {"task", id}, {"annotator", annotator}});
    return id;
  }
  return std::nullopt;
}

AnnotationTask AnnotationStore::task(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return find(id);
}

std::vector<std::string> AnnotationStore::task_ids() const {
  std::shared_lock lock(mutex_);
  return order_;
}

SubmitResult AnnotationStore::submit(const std::string& id, const std::string& annotator,
                                     const std::vector<Reference>& refs, std::optional<std::uint64_t> expected_revision) {
  std::unique_lock lock(mutex_);
  const auto& task = find(id);
  if (std::find(task.annotators.begin(), task.annotators.end(), annotator) == task.annotators.end()) {
    throw Error(Errc::NotAssigned, annotator + " is not assigned to task " + id, "annotator");
  }
  if (expected_revision && *expected_revision != task.revision) {
    throw Error(Errc::Conflict, "task " + id + " is at revision " + std::to_string(task.revision), "revision");
  }
  if (refs.size() > config_.max_references) {
    throw Error(Errc::TooManyReferences,
                std::to_string(refs.size()) + " references, at most " + std::to_string(config_.max_references),
                "operation");
  }
  const Sentence& source = task.instance.sentence;
  check_references(source, refs);

  SubmitResult result;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    Reference normalized = normalize_reference(source, refs[k]);
    if (normalized.empty() && !refs[k].empty()) {
      result.warnings.push_back("operation[" + std::to_string(k) + "] does not change the sentence; stored as {}");
    }
    result.preview.push_back(apply_reference(source, normalized));
    result.references.push_back(std::move(normalized));
  }
  persist({{"type", "submit"}, {"task", id}, {"annotator", annotator}, {"operation", refs_to_json(result.references)}});
  result.revision = find(id).revision;
  return result;
}

AgreementDiff AnnotationStore::diff(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto& task = find(id);
  if (task.submissions.size() < 2) {
    throw Error(Errc::InsufficientSubmissions,
                "task " + id + " has " + std::to_string(task.submissions.size()) + " submission(s)");
  }
  AgreementDiff d;
  // sorted by annotator so the result does not depend on submission order
  std::vector<const Submission*> subs;
  for (const auto& s : task.submissions) subs.push_back(&s);
  std::sort(subs.begin(), subs.end(), [](const Submission* a, const Submission* b) { return a->annotator < b->annotator; });
  for (const Submission* s : subs) {
    d.annotators.push_back(s->annotator);
    d.realized.push_back(realized_set(task.instance.sentence, s->references));
  }
  d.agreement = true;
  for (std::size_t a = 0; a < subs.size(); ++a) {
    for (std::size_t b = a + 1; b < subs.size(); ++b) {
      const bool same = d.realized[a] == d.realized[b];
      d.pairs.push_back({d.annotators[a], d.annotators[b], same});
      d.agreement = d.agreement && same;
    }
  }
  return d;
}

AnnotationTask AnnotationStore::resolve(const std::string& id, const std::string& expert,
                                        const std::vector<Reference>& refs,
                                        std::optional<std::vector<ErrorType>> error_types) {
  std::unique_lock lock(mutex_);
  const auto& task = find(id);
  const Sentence& source = task.instance.sentence;
  check_references(source, refs);
  if (refs.size() > config_.max_references) {
    throw Error(Errc::TooManyReferences, "at most " + std::to_string(config_.max_references) + " references",
                "operation");
  }

  std::vector<Reference> final_refs;
  std::set<Sentence> seen;
  for (const auto& r : refs) {
    Reference normalized = normalize_reference(source, r);
    if (seen.insert(apply_reference(source, normalized)).second) final_refs.push_back(std::move(normalized));
  }
  const bool any_edit = std::any_of(final_refs.begin(), final_refs.end(), [](const Reference& r) { return !r.empty(); });
  if (task.instance.error_flag && !any_edit) {
    throw Error(Errc::InvalidReference, "an erroneous sentence needs at least one non-empty reference", "operation");
  }
  if (final_refs.empty()) final_refs.push_back({});

  Json event{{"type", "resolve"}, {"task", id}, {"expert", expert}, {"operation", refs_to_json(final_refs)}};
  if (error_types) {
    Json names = Json::array();
    for (ErrorType t : *error_types) names.push_back(std::string(to_string(t)));
    event["error_type"] = std::move(names);
  }
  persist(std::move(event));
  return find(id);
}

std::vector<CorrectionInstance> AnnotationStore::export_instances(const ExportFilter& filter) const {
  std::shared_lock lock(mutex_);
  std::vector<CorrectionInstance> out;
  for (const auto& id : order_) {
    const auto& task = tasks_.at(id);
    if (!filter.statuses.count(task.status)) continue;
    CorrectionInstance inst = task.instance;
    if (task.status == TaskStatus::Resolved) {
      inst.references = task.resolution;
      inst.error_flag = inst.has_nonempty_reference();
      if (!inst.error_flag) inst.error_types.clear();
    }
    out.push_back(std::move(inst));
  }
  return out;
}

AnnotationStore::Json AnnotationStore::state_json() const {
  Json tasks = Json::array();
  for (const auto& id : order_) {
    const auto& t = tasks_.at(id);
    Json subs = Json::array();
    for (const auto& s : t.submissions) subs.push_back({{"annotator", s.annotator}, {"operation", refs_to_json(s.references)}});
    Json audit = Json::array();
    for (const auto& a : t.audit)
      audit.push_back({{"seq", a.seq}, {"expert", a.expert}, {"operation", refs_to_json(a.references)}});
    tasks.push_back({{"id", id},
                     {"record", corpus::instance_to_json(t.instance)},
                     {"annotators", t.annotators},
                     {"submissions", std::move(subs)},
                     {"status", std::string(to_string(t.status))},
                     {"resolution", refs_to_json(t.resolution)},
                     {"audit", std::move(audit)},
                     {"revision", t.revision}});
  }
  return {{"seq", seq_}, {"cursor", cursor_}, {"tasks", std::move(tasks)}};
}

void AnnotationStore::load_state(const Json& state) {
  seq_ = state.at("seq").get<std::uint64_t>();
  cursor_ = state.at("cursor").get<std::size_t>();
  for (const auto& jt : state.at("tasks")) {
    AnnotationTask t;
    const auto id = jt.at("id").get<std::string>();
    t.instance = corpus::instance_from_json(id, jt.at("record"));
    t.annotators = jt.at("annotators").get<std::vector<std::string>>();
    for (const auto& s : jt.at("submissions"))
      t.submissions.push_back({s.at("annotator").get<std::string>(), refs_from_json(s.at("operation"), "operation")});
    t.status = *parse_status(jt.at("status").get<std::string>());
    t.resolution = refs_from_json(jt.at("resolution"), "resolution");
    for (const auto& a : jt.at("audit"))
      t.audit.push_back({a.at("seq").get<std::uint64_t>(), a.at("expert").get<std::string>(),
                         refs_from_json(a.at("operation"), "operation")});
    t.revision = jt.at("revision").get<std::uint64_t>();
    order_.push_back(id);
    tasks_.emplace(id, std::move(t));
  }
}

void AnnotationStore::write_snapshot_locked() {
  if (!dir_) return;
  const auto tmp = *dir_ / "snapshot.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << state_json().dump();
    if (!out) throw Error(Errc::Conflict, "failed to write snapshot");
  }
  std::filesystem::rename(tmp, *dir_ / "snapshot.json");
  events_since_snapshot_ = 0;
}

void AnnotationStore::snapshot() {
  std::unique_lock lock(mutex_);
  write_snapshot_locked();
}

std::uint64_t AnnotationStore::last_seq() const {
  std::shared_lock lock(mutex_);
  return seq_;
}

}  // namespace fcgec::service
