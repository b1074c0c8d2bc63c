#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fcgec/corpus.hpp"
#include "fcgec/model.hpp"

namespace fcgec::service {

enum class TaskStatus { Open, Conflicting, Resolved };

std::string_view to_string(TaskStatus status);
std::optional<TaskStatus> parse_status(std::string_view text);

struct Submission {
  std::string annotator;
  std::vector<Reference> references;  // normalized
};

struct AuditEntry {
  std::uint64_t seq = 0;
  std::string expert;
  std::vector<Reference> references;
};

struct AnnotationTask {
  CorrectionInstance instance;
  std::vector<std::string> annotators;
  std::vector<Submission> submissions;  // in first-submission order
  TaskStatus status = TaskStatus::Open;
  std::vector<Reference> resolution;
  std::vector<AuditEntry> audit;
  std::uint64_t revision = 0;

  const Submission* submission_of(const std::string& annotator) const;
};

struct SubmitResult {
  std::vector<Reference> references;
  std::vector<Sentence> preview;
  std::vector<std::string> warnings;
  std::uint64_t revision = 0;
};

struct AgreementDiff {
  struct Pair {
    std::string first;
    std::string second;
    bool agree = false;
  };
  std::vector<std::string> annotators;
  std::vector<std::set<Sentence>> realized;  // per annotator, same order
  std::vector<Pair> pairs;
  bool agreement = false;
};

struct ServiceConfig {
  std::size_t replicas = 2;        // distinct annotators per task, 2..4
  std::size_t max_references = 5;  // per submission
  std::size_t snapshot_every = 200;
};

struct ExportFilter {
  std::set<TaskStatus> statuses{TaskStatus::Resolved};
};

/// Realized target sentences of a reference list; an empty list (or only
/// empty references) realizes the source itself.
std::set<Sentence> realized_set(const Sentence& source, const std::vector<Reference>& refs);

/// Task store behind the annotation workbench. With a data directory every
/// mutation is appended to events.jsonl before it takes effect, and a
/// snapshot is written every `snapshot_every` events; construction recovers
/// by loading the snapshot and replaying later events.
class AnnotationStore {
 public:
  explicit AnnotationStore(ServiceConfig config = {});
  AnnotationStore(std::filesystem::path data_dir, ServiceConfig config = {});

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  /// Adds instances whose ids are not yet known. Returns how many were added.
  std::size_t import(const std::vector<CorrectionInstance>& instances);

  /// Returns the annotator's pending task if any, otherwise assigns the
  /// earliest open task that still lacks annotators and does not already
  /// have this one.
  std::optional<std::string> next_task(const std::string& annotator);

  AnnotationTask task(const std::string& id) const;
  std::vector<std::string> task_ids() const;

  /// Throws NotAssigned, TooManyReferences, InvalidReference, Conflict
  /// (stale expected_revision) or NotFound.
  SubmitResult submit(const std::string& id, const std::string& annotator, const std::vector<Reference>& refs,
                      std::optional<std::uint64_t> expected_revision = std::nullopt);

  /// Throws InsufficientSubmissions with fewer than two submissions.
  AgreementDiff diff(const std::string& id) const;

  AnnotationTask resolve(const std::string& id, const std::string& expert, const std::vector<Reference>& refs,
                         std::optional<std::vector<ErrorType>> error_types = std::nullopt);

  std::vector<CorrectionInstance> export_instances(const ExportFilter& filter = {}) const;

  void snapshot();
  std::uint64_t last_seq() const;

 private:
  using Json = corpus::Json;

  void persist(Json event);
  void apply_event(const Json& event);
  void apply_import(const CorrectionInstance& inst);
  void apply_assign(const std::string& id, const std::string& annotator);
  void apply_submit(const std::string& id, const std::string& annotator, std::vector<Reference> refs);
  void apply_resolve(const std::string& id, const std::string& expert, std::vector<Reference> refs,
                     std::optional<std::vector<ErrorType>> types, std::uint64_t seq);
  AnnotationTask& find(const std::string& id);
  const AnnotationTask& find(const std::string& id) const;
  Json state_json() const;
  void load_state(const Json& state);
  void write_snapshot_locked();
  void recover();

  ServiceConfig config_;
  std::optional<std::filesystem::path> dir_;
  std::ofstream log_;
  mutable std::shared_mutex mutex_;
  std::vector<std::string> order_;
  std::map<std::string, AnnotationTask> tasks_;
  std::size_t cursor_ = 0;  // tasks before it have all their annotators
  std::uint64_t seq_ = 0;
  std::uint64_t events_since_snapshot_ = 0;
};

}  // namespace fcgec::service
