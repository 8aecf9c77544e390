#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "nids/hyperopt.hpp"
#include "text_util.hpp"

namespace nids {

using nlohmann::json;

namespace {

json candidate_json(const Candidate& c, const SearchSpace& space) {
    json out = json::object();
    for (std::size_t d = 0; d < space.dims(); ++d) {
        const auto& p = space.params()[d];
        if (p.is_categorical()) {
            out[p.name] = p.value_string(c.index[d]);
        } else {
            out[p.name] = space.int_value(c, p.name);
        }
    }
    return out;
}

Candidate candidate_from_json(const json& j, const SearchSpace& space) {
    Candidate c;
    for (const auto& p : space.params()) {
        if (!j.contains(p.name)) throw DataError("trace line lacks parameter '" + p.name + "'");
        const auto& v = j.at(p.name);
        const std::string text = v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>());
        const auto idx = p.index_of(text);
        if (!idx) throw DataError("trace value '" + text + "' lies outside parameter '" + p.name + "'");
        c.index.push_back(*idx);
    }
    return c;
}

}  // namespace

void write_trace_jsonl(const OptimizationTrace& trace, const SearchSpace& space, std::ostream& out) {
    for (const auto& t : trace.trials) {
        json line = {{"eval_index", t.eval_index},
                     {"candidate", candidate_json(t.candidate, space)},
                     {"score", t.score},
                     {"wall_time", t.wall_time},
                     {"cached", t.cached}};
        out << line.dump() << '\n';
    }
}

OptimizationTrace read_trace_jsonl(std::istream& in, const SearchSpace& space, std::string optimizer) {
    OptimizationTrace trace;
    trace.optimizer = std::move(optimizer);
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (trim(text).empty()) continue;
        try {
            const auto j = json::parse(text);
            Trial t;
            t.eval_index = j.at("eval_index").get<std::size_t>();
            t.candidate = candidate_from_json(j.at("candidate"), space);
            t.score = j.at("score").get<double>();
            t.wall_time = j.value("wall_time", 0.0);
            t.cached = j.value("cached", false);
            trace.trials.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw DataError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (std::size_t i = 1; i < trace.trials.size(); ++i) {
        if (trace.trials[i].score > trace.trials[trace.best_index].score) trace.best_index = i;
    }
    trace.budget = trace.trials.size();
    return trace;
}

void write_trace_csv(const OptimizationTrace& trace, const SearchSpace& space, std::ostream& out) {
    out << "eval_index";
    for (const auto& p : space.params()) out << ',' << p.name;
    out << ",score,wall_time\n";
    for (const auto& t : trace.trials) {
        out << t.eval_index;
        for (std::size_t d = 0; d < space.dims(); ++d) out << ',' << space.params()[d].value_string(t.candidate.index[d]);
        out << ',' << format_number(t.score) << ',' << format_number(t.wall_time) << '\n';
    }
}

}  // namespace nids
