#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ekichabi/analytics.hpp"
#include "ekichabi/bench.hpp"
#include "ekichabi/catalog.hpp"
#include "ekichabi/gateway.hpp"
#include "ekichabi/navigator.hpp"
#include "ekichabi/phone.hpp"
#include "ekichabi/snapshot.hpp"
#include "ekichabi/usage_log.hpp"

namespace py = pybind11;
using namespace ekichabi;

namespace {

py::dict business_dict(const Business& b) {
  py::dict d;
  d["id"] = b.id;
  d["name"] = b.name;
  d["owner_name"] = b.owner_name;
  d["phone"] = b.phone;
  d["sector"] = static_cast<int>(b.sector);
  d["subsector"] = b.subsector;
  d["products"] = b.products;
  d["district"] = b.district;
  d["village"] = b.village;
  d["subvillage"] = b.subvillage;
  return d;
}

FilterState filter_from(const py::dict& d) {
  FilterState f;
  for (auto item : d) {
    const auto key = item.first.cast<std::string>();
    if (key == "sector") {
      if (py::isinstance<py::int_>(item.second)) {
        const int code = item.second.cast<int>();
        if (!is_valid_sector_code(code)) throw py::value_error("unknown sector code");
        f.sector = static_cast<Sector>(code);
      } else {
        auto s = SectorTaxonomy::standard().parse(item.second.cast<std::string>());
        if (!s) throw py::value_error("unknown sector");
        f.sector = *s;
      }
    } else if (key == "subsector") {
      f.subsector = item.second.cast<std::string>();
    } else if (key == "district") {
      f.district = item.second.cast<std::string>();
    } else if (key == "village") {
      f.village = item.second.cast<std::string>();
    } else if (key == "subvillage") {
      f.subvillage = item.second.cast<std::string>();
    } else {
      throw py::key_error("unknown filter '" + key + "'");
    }
  }
  return f;
}

py::object parse_json(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

LogBatch batch_from(const py::dict& d) {
  LogBatch b;
  b.msisdn = d["msisdn"].cast<std::string>();
  b.base_ts = d["base_ts"].cast<std::uint32_t>();
  if (d.contains("version")) {
    const auto v = d["version"].cast<std::string>();
    if (v.size() != 8) throw py::value_error("version must be 8 bytes");
    std::copy(v.begin(), v.end(), b.version.begin());
  }
  for (auto item : d["records"].cast<py::list>()) {
    const auto r = item.cast<py::dict>();
    UsageLogRecord rec;
    const auto action = parse_action_name(r["action"].cast<std::string>());
    if (!action) throw py::value_error("unknown action");
    rec.action = *action;
    rec.dt = r.contains("dt") ? r["dt"].cast<std::uint64_t>() : 0;
    if (r.contains("business")) rec.business = r["business"].cast<BusinessId>();
    if (r.contains("query")) rec.query = r["query"].cast<std::string>();
    if (r.contains("facets")) {
      for (auto f : r["facets"].cast<py::list>()) {
        auto pair = f.cast<std::pair<int, std::uint64_t>>();
        rec.facets.push_back({static_cast<std::uint8_t>(pair.first), pair.second});
      }
    }
    b.records.push_back(std::move(rec));
  }
  return b;
}

py::dict batch_dict(const LogBatch& b) {
  py::dict d;
  d["msisdn"] = b.msisdn;
  d["base_ts"] = b.base_ts;
  d["version"] = py::bytes(reinterpret_cast<const char*>(b.version.data()), b.version.size());
  py::list records;
  for (const auto& r : b.records) {
    py::dict rec;
    rec["action"] = action_name(r.action);
    rec["dt"] = r.dt;
    if (carries_business(r.action)) {
      rec["business"] = r.business;
    } else if (r.action == Action::FilterSearch) {
      py::list facets;
      for (const auto& f : r.facets) facets.append(py::make_tuple(f.facet, f.value));
      rec["facets"] = facets;
    } else {
      rec["query"] = r.query;
    }
    records.append(rec);
  }
  d["records"] = records;
  return d;
}

class PyGateway {
 public:
  PyGateway(std::shared_ptr<const Catalog> c, const std::string& whitelist, bool cache)
      : sink_(std::make_shared<MemorySink>()),
        gw_(std::move(c), Whitelist::parse(whitelist), options(cache), nullptr,
            std::make_shared<HitLog>(sink_, 1)) {}

  py::tuple handle(const std::string& sid, const std::string& phone, const std::string& text,
                   std::optional<std::int64_t> now) {
    GatewayRequest r{sid, "", phone, text};
    auto out = now ? gw_.handle_request(r, *now) : gw_.handle_request(r);
    return py::make_tuple(out.status, out.body);
  }

  std::vector<std::string> hit_lines() const { return sink_->lines(); }
  std::string version() const { return gw_.version(); }
  std::string reload(const py::bytes& snapshot) { return gw_.reload_directory(std::string(snapshot)); }

 private:
  static GatewayOptions options(bool cache) {
    GatewayOptions o;
    o.cache = cache;
    return o;
  }
  std::shared_ptr<MemorySink> sink_;
  GatewayService gw_;
};

}  // namespace

PYBIND11_MODULE(_ekichabi, m) {
  m.doc() = "Directory engine bindings";

  // Leaked on purpose: the types must outlive interpreter teardown.
  static const py::handle snapshot_error =
      (new py::exception<SnapshotError>(m, "SnapshotError", PyExc_ValueError))->ptr();
  static const py::handle log_error =
      (new py::exception<LogError>(m, "LogError", PyExc_ValueError))->ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SnapshotError& e) {
      py::object err = snapshot_error(e.what());
      err.attr("kind") = to_string(e.kind());
      err.attr("offset") = e.offset();
      PyErr_SetObject(snapshot_error.ptr(), err.ptr());
    } catch (const LogError& e) {
      py::object err = log_error(e.what());
      err.attr("kind") = to_string(e.kind());
      err.attr("record") =
          e.record() == LogError::kHeader ? py::none() : py::cast(e.record());
      PyErr_SetObject(log_error.ptr(), err.ptr());
    } catch (const InvalidNumberError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DirectoryError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("normalize_msisdn", &normalize_msisdn, py::arg("raw"));

  py::class_<Catalog, std::shared_ptr<Catalog>>(m, "Catalog")
      .def_static("synthetic",
                  [](std::uint64_t seed, std::size_t n) {
                    return std::const_pointer_cast<Catalog>(
                        Catalog::build(generate_synthetic(seed, n)));
                  },
                  py::arg("seed"), py::arg("n"))
      .def_static("from_csv",
                  [](const std::string& text) {
                    return std::const_pointer_cast<Catalog>(Catalog::build(parse_csv(text)));
                  },
                  py::arg("text"))
      .def_static("from_snapshot",
                  [](const py::bytes& b) {
                    return std::const_pointer_cast<Catalog>(
                        Catalog::from_snapshot(std::string(b)));
                  },
                  py::arg("data"))
      .def_property_readonly("version", [](const Catalog& c) { return c.version; })
      .def("__len__", [](const Catalog& c) { return c.directory->size(); })
      .def("snapshot", [](const Catalog& c) { return py::bytes(c.snapshot); })
      .def("to_csv", [](const Catalog& c) { return to_csv(*c.directory); })
      .def("business",
           [](const Catalog& c, BusinessId id) { return business_dict(c.directory->at(id)); },
           py::arg("id"))
      .def("count",
           [](const Catalog& c, const py::dict& filters) {
             return c.indexed->count({std::nullopt, filter_from(filters)});
           },
           py::arg("filters") = py::dict())
      .def("options",
           [](const Catalog& c, const std::string& facet, const py::dict& filters) {
             for (Facet f : kAllFacets) {
               if (facet == to_string(f)) return c.indexed->options_for(filter_from(filters), f);
             }
             throw py::value_error("unknown facet '" + facet + "'");
           },
           py::arg("facet"), py::arg("filters") = py::dict())
      .def("fuzzy",
           [](const Catalog& c, const std::string& query, std::size_t k) {
             std::vector<std::tuple<std::string, std::string, std::size_t>> out;
             for (const auto& cand : c.keywords->fuzzy_candidates(query, k)) {
               out.emplace_back(cand.text, to_string(cand.kind), cand.distance);
             }
             return out;
           },
           py::arg("query"), py::arg("k") = kDefaultCandidates);

  py::class_<PyGateway>(m, "Gateway")
      .def(py::init<std::shared_ptr<const Catalog>, const std::string&, bool>(),
           py::arg("catalog"), py::arg("whitelist"), py::arg("cache") = true)
      .def("handle", &PyGateway::handle, py::arg("session_id"), py::arg("phone"),
           py::arg("text") = "", py::arg("now") = py::none())
      .def("hits", &PyGateway::hit_lines)
      .def("reload", &PyGateway::reload, py::arg("snapshot"))
      .def_property_readonly("version", &PyGateway::version);

  m.def("encode_batch", [](const py::dict& d) { return py::bytes(encode_batch(batch_from(d))); },
        py::arg("batch"));
  m.def("decode_batch", [](const py::bytes& b) { return batch_dict(decode_batch(std::string(b))); },
        py::arg("data"));

  m.def("build_report",
        [](const std::string& hitlog, const std::string& actions, const std::string& demo) {
          return parse_json(to_json(build_report(hitlog, actions, demo)));
        },
        py::arg("hitlog"), py::arg("actions"), py::arg("demographics") = "");

  m.def("run_bench",
        [](std::shared_ptr<const Catalog> c, std::size_t walks, const std::string& mode,
           std::uint64_t seed) {
          auto parsed = parse_bench_mode(mode);
          if (!parsed) throw py::value_error("mode must be on, off or both");
          WalkOptions o;
          o.walks = walks;
          o.seed = seed;
          BenchResult r;
          {
            py::gil_scoped_release release;
            r = run_bench(std::move(c), *parsed, o);
          }
          return parse_json(to_json(r));
        },
        py::arg("catalog"), py::arg("walks") = 100, py::arg("mode") = "both",
        py::arg("seed") = 1);
}
