#include "gridrel/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gridrel
{
    using nlohmann::json;

    ValidationError::ValidationError(std::vector<std::string> v)
        : std::runtime_error(
              [&v]
              {
                  std::string msg = "scenario has " + std::to_string(v.size()) + " violation(s):";
                  for (const auto &s : v)
                      msg += "\n  " + s;
                  return msg;
              }()),
          violations(std::move(v))
    {
    }

    namespace
    {
        // Walks a JSON object while remembering where it is, so every error
        // names the offending field.
        class Fields
        {
        public:
            Fields(const json &obj, std::string path, std::string_view source)
                : obj_(obj), path_(std::move(path)), source_(source)
            {
                if (!obj_.is_object())
                    fail(path_.empty() ? "<root>" : path_, "expected an object");
            }

            [[noreturn]] void fail(const std::string &field, const std::string &what) const
            {
                std::ostringstream os;
                os << source_ << ": field '" << field << "': " << what;
                throw ParseError(os.str());
            }

            std::string field(std::string_view key) const
            {
                return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
            }

            void allow_only(std::initializer_list<std::string_view> keys) const
            {
                for (const auto &[k, _] : obj_.items())
                {
                    bool known = false;
                    for (auto a : keys)
                        known = known || a == k;
                    if (!known)
                        fail(field(k), "unknown key");
                }
            }

            const json *find(std::string_view key) const
            {
                auto it = obj_.find(std::string(key));
                return it == obj_.end() ? nullptr : &*it;
            }

            const json &require(std::string_view key) const
            {
                if (auto *v = find(key))
                    return *v;
                fail(field(key), "is required");
            }

            double number(std::string_view key, double fallback) const
            {
                auto *v = find(key);
                if (!v)
                    return fallback;
                return as_number(*v, field(key));
            }

            double number(std::string_view key) const { return as_number(require(key), field(key)); }

            double as_number(const json &v, const std::string &f) const
            {
                if (!v.is_number())
                    fail(f, "expected a number");
                return v.get<double>();
            }

            int integer(std::string_view key, int fallback) const
            {
                auto *v = find(key);
                if (!v)
                    return fallback;
                if (!v->is_number_integer())
                    fail(field(key), "expected an integer");
                return v->get<int>();
            }

            std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) const
            {
                auto *v = find(key);
                if (!v)
                    return fallback;
                if (!v->is_number_unsigned())
                    fail(field(key), "expected a non-negative integer");
                return v->get<std::uint64_t>();
            }

            std::optional<std::string> text(std::string_view key) const
            {
                auto *v = find(key);
                if (!v)
                    return std::nullopt;
                if (!v->is_string())
                    fail(field(key), "expected a string");
                return v->get<std::string>();
            }

            const json &array(std::string_view key) const
            {
                const auto &v = require(key);
                if (!v.is_array())
                    fail(field(key), "expected an array");
                return v;
            }

            std::string_view source() const { return source_; }
            const std::string &path() const { return path_; }

        private:
            const json &obj_;
            std::string path_;
            std::string_view source_;
        };

        template <typename T, typename Parser>
        T enum_field(const Fields &f, std::string_view key, T fallback, Parser parse, std::string_view legal)
        {
            auto s = f.text(key);
            if (!s)
                return fallback;
            if (auto v = parse(*s))
                return *v;
            f.fail(f.field(key), "unknown value \"" + *s + "\" (expected one of: " + std::string(legal) + ")");
        }

        GridNode parse_node(const json &j, std::size_t index, std::string_view source)
        {
            Fields f(j, "nodes[" + std::to_string(index) + "]", source);
            f.allow_only({"id", "mips", "cost_per_sec", "lambda_per_hour", "mu_per_hour", "degradation"});
            GridNode n;
            n.id = f.integer("id", static_cast<int>(index));
            n.mips = f.number("mips");
            n.cost_per_sec = f.number("cost_per_sec", 0.0);
            n.failure.lambda_per_hour = f.number("lambda_per_hour", 0.0);
            n.failure.mu_per_hour = f.number("mu_per_hour", 1.0);
            n.failure.degradation = f.number("degradation", 0.0);
            return n;
        }

        QosRequirement parse_qos(const json &j, const std::string &path, std::string_view source)
        {
            Fields f(j, path, source);
            f.allow_only({"deadline_s", "min_level", "max_retries"});
            QosRequirement q;
            if (f.find("deadline_s"))
                q.deadline_s = f.number("deadline_s");
            if (f.find("min_level"))
                q.min_level = enum_field(f, "min_level", ReliabilityLevel::Poor, parse_reliability_level,
                                         "high, good, medium, low, poor");
            q.max_retries = f.integer("max_retries", 3);
            return q;
        }

        Job parse_job(const json &j, std::size_t index, std::string_view source)
        {
            const std::string path = "jobs[" + std::to_string(index) + "]";
            Fields f(j, path, source);
            f.allow_only({"id", "arrival_s", "app_model", "tasks", "qos"});
            Job job;
            job.id = f.integer("id", static_cast<int>(index));
            job.arrival_s = f.number("arrival_s", 0.0);
            job.app_model =
                enum_field(f, "app_model", AppModel::MasterWorker, parse_app_model, "master_worker, spmd");
            const auto &tasks = f.array("tasks");
            for (std::size_t t = 0; t < tasks.size(); ++t)
            {
                Fields tf(tasks[t], path + ".tasks[" + std::to_string(t) + "]", source);
                tf.allow_only({"length_mi"});
                Task task;
                task.id = static_cast<int>(t);
                task.job_id = job.id;
                task.length_mi = tf.number("length_mi");
                job.tasks.push_back(task);
            }
            if (auto *q = f.find("qos"))
                job.qos = parse_qos(*q, path + ".qos", source);
            return job;
        }
    }

    Scenario parse_scenario(std::string_view text, std::string_view source)
    {
        json root;
        try
        {
            root = json::parse(text.begin(), text.end());
        }
        catch (const json::parse_error &e)
        {
            std::size_t line = 1, col = 1;
            const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
            for (std::size_t i = 0; i < upto; ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                {
                    ++col;
                }
            }
            std::ostringstream os;
            os << source << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")";
            throw ParseError(os.str());
        }

        Fields top(root, "", source);
        top.allow_only({"nodes", "jobs", "policy", "seed", "horizon_s", "options"});

        Scenario s;
        const auto &nodes = top.array("nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i)
            s.nodes.push_back(parse_node(nodes[i], i, source));
        const auto &jobs = top.array("jobs");
        for (std::size_t i = 0; i < jobs.size(); ++i)
            s.jobs.push_back(parse_job(jobs[i], i, source));

        s.policy = enum_field(top, "policy", PolicyId::ReliabilityFirst, parse_policy,
                              "reliability_first, min_time, cost_aware");
        s.seed = top.unsigned_integer("seed", 0);
        s.horizon_s = top.number("horizon_s", kDefaultHorizonSeconds);

        if (auto *o = top.find("options"))
        {
            Fields opts(*o, "options", source);
            opts.allow_only({"epsilon", "success_rate_mode"});
            s.epsilon = opts.number("epsilon", 1e-9);
            s.success_rate_mode =
                enum_field(opts, "success_rate_mode", SuccessRateMode::Smoothed, parse_success_rate_mode,
                           "smoothed, raw");
        }

        auto violations = validate_scenario(s);
        if (!violations.empty())
            throw ValidationError(std::move(violations));
        return s;
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read scenario file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str(), path.string());
    }

    std::string dump_scenario(const Scenario &s)
    {
        json root = json::object();
        root["nodes"] = json::array();
        for (const auto &n : s.nodes)
        {
            root["nodes"].push_back({{"id", n.id},
                                     {"mips", n.mips},
                                     {"cost_per_sec", n.cost_per_sec},
                                     {"lambda_per_hour", n.failure.lambda_per_hour},
                                     {"mu_per_hour", n.failure.mu_per_hour},
                                     {"degradation", n.failure.degradation}});
        }
        root["jobs"] = json::array();
        for (const auto &j : s.jobs)
        {
            json tasks = json::array();
            for (const auto &t : j.tasks)
                tasks.push_back({{"length_mi", t.length_mi}});
            json qos = {{"max_retries", j.qos.max_retries}};
            if (j.qos.deadline_s)
                qos["deadline_s"] = *j.qos.deadline_s;
            if (j.qos.min_level)
                qos["min_level"] = std::string(to_string(*j.qos.min_level));
            root["jobs"].push_back({{"id", j.id},
                                    {"arrival_s", j.arrival_s},
                                    {"app_model", std::string(to_string(j.app_model))},
                                    {"tasks", tasks},
                                    {"qos", qos}});
        }
        root["policy"] = std::string(to_string(s.policy));
        root["seed"] = s.seed;
        root["horizon_s"] = s.horizon_s;
        root["options"] = {{"epsilon", s.epsilon},
                           {"success_rate_mode", std::string(to_string(s.success_rate_mode))}};
        return root.dump(2) + "\n";
    }
}
