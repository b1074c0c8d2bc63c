#include "fcgec/http.hpp"

#include <httplib.h>

#include <functional>

#include "fcgec/error.hpp"
#include "fcgec/min_edit.hpp"

namespace fcgec::service {

namespace {

using Json = corpus::Json;

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()),
            {{"code", std::string(errc_name(e.code()))}, {"message", e.what()}, {"field_path", e.field_path()}});
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const Json::exception& e) {
      send_error(res, Error(Errc::SchemaError, e.what()));
    }
  };
}

Json parse_body(const httplib::Request& req) {
  Json body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw Error(Errc::SchemaError, "body must be a JSON object");
  return body;
}

std::string required_string(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(Errc::SchemaError, std::string(key) + " must be a non-empty string", key);
  }
  return it->get<std::string>();
}

std::string required_param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key) || req.get_param_value(key).empty()) {
    throw Error(Errc::SchemaError, std::string("missing query parameter ") + key, key);
  }
  return req.get_param_value(key);
}

std::vector<Reference> references_of(const Json& body) {
  auto it = body.find("operation");
  if (it == body.end()) throw Error(Errc::SchemaError, "operation is required", "operation");
  Json ops = *it;
  if (ops.is_object()) ops = Json::array({ops});
  if (!ops.is_array()) throw Error(Errc::SchemaError, "operation must be an array of references", "operation");
  std::vector<Reference> refs;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    refs.push_back(corpus::reference_from_json(ops[k], "operation[" + std::to_string(k) + "]"));
  }
  return refs;
}

Json refs_json(const std::vector<Reference>& refs) {
  Json arr = Json::array();
  for (const auto& r : refs) arr.push_back(corpus::reference_to_json(r));
  return arr;
}

Json sentences_json(const std::set<Sentence>& sentences) {
  Json arr = Json::array();
  for (const auto& s : sentences) arr.push_back(s.utf8());
  return arr;
}

Json task_json(const std::string& id, const AnnotationTask& t) {
  Json subs = Json::array();
  for (const auto& s : t.submissions) {
    subs.push_back({{"annotator", s.annotator},
                    {"operation", refs_json(s.references)},
                    {"realized", sentences_json(realized_set(t.instance.sentence, s.references))}});
  }
  Json audit = Json::array();
  for (const auto& a : t.audit) audit.push_back({{"seq", a.seq}, {"expert", a.expert}, {"operation", refs_json(a.references)}});
  Json rec = corpus::instance_to_json(t.instance);
  return {{"id", id},
          {"sentence", t.instance.sentence.utf8()},
          {"error_flag", t.instance.error_flag},
          {"error_type", rec["error_type"]},
          {"status", std::string(to_string(t.status))},
          {"revision", t.revision},
          {"annotators", t.annotators},
          {"submissions", std::move(subs)},
          {"resolution", refs_json(t.resolution)},
          {"audit", std::move(audit)}};
}

std::optional<std::vector<ErrorType>> error_types_of(const Json& body) {
  auto it = body.find("error_type");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) throw Error(Errc::SchemaError, "error_type must be an array", "error_type");
  std::vector<ErrorType> out;
  for (std::size_t k = 0; k < it->size(); ++k) {
    const Json& name = (*it)[k];
    auto t = name.is_string() ? parse_error_type(name.get<std::string>()) : std::nullopt;
    if (!t) throw Error(Errc::SchemaError, "unknown error type", "error_type[" + std::to_string(k) + "]");
    out.push_back(*t);
  }
  return out;
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::NotFound: return 404;
    case Errc::NotAssigned: return 403;
    case Errc::InvalidReference:
    case Errc::TooManyReferences:
    case Errc::InvalidUtf8: return 422;
    case Errc::InsufficientSubmissions:
    case Errc::Conflict: return 409;
    default: return 400;
  }
}

void register_routes(httplib::Server& server, AnnotationStore& store) {
  server.Get("/v1/tasks/next", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const auto annotator = required_param(req, "annotator");
    auto id = store.next_task(annotator);
    if (!id) {
      send_json(res, 200, {{"id", nullptr}});
      return;
    }
    send_json(res, 200, task_json(*id, store.task(*id)));
  }));

  server.Get(R"(/v1/tasks/([^/]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    send_json(res, 200, task_json(id, store.task(id)));
  }));

  server.Post(R"(/v1/tasks/([^/]+)/submissions)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const Json body = parse_body(req);
    const auto annotator = required_string(body, "annotator");
    std::optional<std::uint64_t> revision;
    if (body.contains("revision") && !body["revision"].is_null()) {
      if (!body["revision"].is_number_unsigned()) throw Error(Errc::SchemaError, "revision must be an integer", "revision");
      revision = body["revision"].get<std::uint64_t>();
    }
    auto result = store.submit(id, annotator, references_of(body), revision);
    Json preview = Json::array();
    for (const auto& s : result.preview) preview.push_back(s.utf8());
    send_json(res, 201, {{"id", id},
                         {"operation", refs_json(result.references)},
                         {"preview", std::move(preview)},
                         {"warnings", result.warnings},
                         {"revision", result.revision},
                         {"status", std::string(to_string(store.task(id).status))}});
  }));

  server.Get(R"(/v1/tasks/([^/]+)/diff)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto d = store.diff(id);
    Json realized = Json::object();
    for (std::size_t k = 0; k < d.annotators.size(); ++k) realized[d.annotators[k]] = sentences_json(d.realized[k]);
    Json pairs = Json::array();
    for (const auto& p : d.pairs) pairs.push_back({{"first", p.first}, {"second", p.second}, {"agree", p.agree}});
    send_json(res, 200, {{"id", id}, {"agreement", d.agreement}, {"realized", std::move(realized)}, {"pairs", std::move(pairs)}});
  }));

  server.Post(R"(/v1/tasks/([^/]+)/resolution)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const Json body = parse_body(req);
    const auto expert = required_string(body, "expert");
    auto task = store.resolve(id, expert, references_of(body), error_types_of(body));
    send_json(res, 200, task_json(id, task));
  }));

  server.Get("/v1/export", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    ExportFilter filter;
    if (req.has_param("status")) {
      filter.statuses.clear();
      std::string list = req.get_param_value("status") + ",";
      std::string token;
      for (char c : list) {
        if (c != ',') {
          token.push_back(c);
          continue;
        }
        if (token == "all") {
          filter.statuses = {TaskStatus::Open, TaskStatus::Conflicting, TaskStatus::Resolved};
        } else if (auto s = parse_status(token)) {
          filter.statuses.insert(*s);
        } else if (!token.empty()) {
          throw Error(Errc::SchemaError, "unknown status " + token, "status");
        }
        token.clear();
      }
    }
    res.status = 200;
    res.set_content(corpus::serialize_corpus(store.export_instances(filter)), "application/json");
  }));

  server.Get("/v1/preview", guarded([](const httplib::Request& req, httplib::Response& res) {
    const Sentence src = Sentence::from_utf8(required_param(req, "src"));
    Json ops = Json::parse(required_param(req, "ops"), nullptr, false);
    if (ops.is_discarded()) throw Error(Errc::SchemaError, "ops is not valid JSON", "ops");
    const Json body{{"operation", ops}};
    const auto refs = references_of(body);

    Json results = Json::array();
    bool all_valid = true;
    for (std::size_t k = 0; k < refs.size(); ++k) {
      Json violations = Json::array();
      for (const auto& v : validate_reference(src, refs[k])) {
        violations.push_back({{"kind", std::string(to_string(v.kind))},
                              {"field_path", "operation[" + std::to_string(k) + "]." + v.field_path},
                              {"message", v.message}});
      }
      Json item{{"valid", violations.empty()}, {"violations", violations}};
      if (violations.empty()) {
        const Reference normalized = normalize_reference(src, refs[k]);
        item["target"] = apply_reference(src, refs[k]).utf8();
        item["normalized"] = corpus::reference_to_json(normalized);
        item["ops"] = op_count(normalized);
      } else {
        all_valid = false;
      }
      results.push_back(std::move(item));
    }
    send_json(res, 200, {{"src", src.utf8()}, {"valid", all_valid}, {"references", std::move(results)}});
  }));
}

bool serve(AnnotationStore& store, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, store);
  return server.listen(host, port);
}

}  // namespace fcgec::service
