#include "stackcast/data_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace stackcast {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& s, const std::string& context, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(context + ": bad numeric value '" + s + "' at line " + std::to_string(line_no));
    }
}

long parse_long(const std::string& s, const std::string& context, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(context + ": bad integer value '" + s + "' at line " + std::to_string(line_no));
    }
}

// Column positions for the expected fields, tolerating extra columns.
std::vector<std::size_t> header_positions(const std::vector<std::string>& header,
                                          const std::vector<std::string>& expected,
                                          const std::string& path) {
    std::vector<std::size_t> pos;
    bool extra = header.size() > expected.size();
    for (const auto& name : expected) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw IoError(path + ": header missing required column '" + name + "'");
        pos.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    if (extra)
        std::cerr << "warning: " << path << ": ignoring unrecognized extra column(s)\n";
    return pos;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::map<ForecastKey, BinnedForecast> load_forecasts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open forecast file " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    const auto pos = header_positions(
        split_csv(line), {"model", "location", "target", "issue", "bin_start", "bin_end", "value"}, path);

    const BinGrid& grid = canonical_grid();
    struct Group {
        std::vector<double> mass;
        double sum = 0.0;
    };
    std::map<ForecastKey, Group> groups;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 7)
            throw IoError(path + ": malformed row at line " + std::to_string(line_no));
        ForecastKey key;
        key.model = fields[pos[0]];
        key.location = fields[pos[1]];
        key.target = static_cast<int>(parse_long(fields[pos[2]], path, line_no));
        key.issue = normalize_epiweek(parse_long(fields[pos[3]], path, line_no));
        const double bin_start = parse_double(fields[pos[4]], path, line_no);
        const double bin_end = parse_double(fields[pos[5]], path, line_no);
        const double value = parse_double(fields[pos[6]], path, line_no);
        if (key.target < 1 || key.target > 4)
            throw IoError(path + ": target must be 1..4 at line " + std::to_string(line_no));

        // bin edges must match a canonical bin exactly
        std::size_t bin = grid.count();
        const auto& edges = grid.edges();
        for (std::size_t b = 0; b < grid.count(); ++b) {
            if (std::abs(edges[b] - bin_start) < 1e-9 && std::abs(edges[b + 1] - bin_end) < 1e-9) {
                bin = b;
                break;
            }
        }
        if (bin == grid.count())
            throw IoError(path + ": bin [" + fields[pos[4]] + ", " + fields[pos[5]] +
                          ") does not match a canonical-grid bin at line " + std::to_string(line_no));
        if (value < 0.0)
            throw IoError(path + ": negative probability at line " + std::to_string(line_no));

        auto& g = groups[key];
        if (g.mass.empty()) g.mass.assign(grid.count(), 0.0);
        g.mass[bin] += value;
        g.sum += value;
    }

    std::map<ForecastKey, BinnedForecast> out;
    for (auto& [key, g] : groups) {
        if (g.sum < 0.9 || g.sum > 1.1)
            throw IoError(path + ": probabilities for (" + key.model + ", " + key.location + ", " +
                          std::to_string(key.target) + ", " + std::to_string(key.issue) +
                          ") sum to " + format_double(g.sum) + ", outside [0.9, 1.1]");
        for (double& p : g.mass) p /= g.sum;
        ForecastMeta meta{key.model, key.location, key.target, key.issue};
        out.emplace(key, BinnedForecast(grid, std::move(g.mass), std::move(meta)));
    }
    return out;
}

TruthSnapshotStore load_truth_snapshots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth file " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    const auto pos = header_positions(split_csv(line), {"issue", "epiweek", "location", "wili"}, path);

    // issue week -> (location, epiweek) -> wili
    std::map<long, std::map<std::pair<std::string, long>, double>> issues;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 4)
            throw IoError(path + ": malformed row at line " + std::to_string(line_no));
        const long issue = normalize_epiweek(parse_long(fields[pos[0]], path, line_no));
        const long epiweek = normalize_epiweek(parse_long(fields[pos[1]], path, line_no));
        const std::string location = fields[pos[2]];
        const double wili = parse_double(fields[pos[3]], path, line_no);
        auto& snap = issues[issue];
        auto [it, inserted] = snap.emplace(std::make_pair(location, epiweek), wili);
        if (!inserted && it->second != wili)
            throw IoError(path + ": conflicting wILI for issue " + std::to_string(issue) +
                          ", epiweek " + std::to_string(epiweek) + ", location " + location);
    }
    if (issues.empty()) throw IoError(path + ": no truth records");

    // each snapshot inherits the latest value reported at or before its issue
    std::vector<TruthSnapshot> snapshots;
    std::map<std::pair<std::string, long>, double> cumulative;
    for (const auto& [issue, values] : issues) {
        for (const auto& [key, wili] : values) cumulative[key] = wili;
        snapshots.emplace_back(issue, cumulative);
    }
    return TruthSnapshotStore(std::move(snapshots));
}

SeasonData load_season(const std::string& forecasts_path, const std::string& truth_path,
                       const std::string& season_label) {
    SeasonData season;
    season.season = season_label;
    season.forecasts = load_forecasts(forecasts_path);
    season.truth = load_truth_snapshots(truth_path);
    std::set<std::string> ids;
    for (const auto& [key, f] : season.forecasts) ids.insert(key.model);
    season.model_ids.assign(ids.begin(), ids.end());
    return season;
}

namespace {

const char* kRunVersionLine = "# stackcast-run v1";

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::EqualWeight: return "equal";
        case Protocol::Static: return "static";
        case Protocol::Adaptive: return "adaptive";
    }
    return "equal";
}

Protocol protocol_from(const std::string& s) {
    if (s == "equal") return Protocol::EqualWeight;
    if (s == "static") return Protocol::Static;
    if (s == "adaptive") return Protocol::Adaptive;
    throw IoError("unknown protocol '" + s + "'");
}

}  // namespace

void save_run(const SeasonRun& run, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write run file " + path);
    out << kRunVersionLine << "\n";
    out << "# protocol=" << protocol_name(run.protocol) << " rho=" << format_double(run.rho)
        << " season=" << run.season << "\n";
    out << "kind,epiweek,location,target,model,value\n";
    for (const auto& [week, weights] : run.weekly_weights)
        for (std::size_t m = 0; m < run.model_ids.size(); ++m)
            out << "weight," << week << ",,," << run.model_ids[m] << ","
                << format_double(weights[m]) << "\n";
    for (const auto& [key, score] : run.weekly_scores)
        out << "score," << key.epiweek << "," << key.location << "," << key.target << ",,"
            << format_double(score) << "\n";
}

SeasonRun load_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open run file " + path);
    std::string line;
    if (!std::getline(in, line) || line != kRunVersionLine)
        throw IoError(path + ": missing or unsupported version line (expected '" +
                      std::string(kRunVersionLine) + "')");
    SeasonRun run;
    std::size_t line_no = 1;
    // metadata comment
    std::streampos after_meta = in.tellg();
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
        ++line_no;
        std::stringstream ss(line.substr(1));
        std::string kv;
        while (ss >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            if (key == "protocol") run.protocol = protocol_from(value);
            else if (key == "rho") run.rho = parse_double(value, path, line_no);
            else if (key == "season") run.season = value;
        }
        after_meta = in.tellg();
    }
    // `line` now holds the header
    ++line_no;
    const auto pos = header_positions(split_csv(line),
                                      {"kind", "epiweek", "location", "target", "model", "value"}, path);
    std::map<long, std::map<std::string, double>> weights;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 6) throw IoError(path + ": malformed row at line " + std::to_string(line_no));
        const std::string& kind = fields[pos[0]];
        const long epiweek = parse_long(fields[pos[1]], path, line_no);
        const double value = parse_double(fields[pos[5]], path, line_no);
        if (kind == "weight") {
            weights[epiweek][fields[pos[4]]] = value;
        } else if (kind == "score") {
            const int target = static_cast<int>(parse_long(fields[pos[3]], path, line_no));
            run.weekly_scores[ScoreKey{epiweek, fields[pos[2]], target}] = value;
        } else {
            throw IoError(path + ": unknown row kind '" + kind + "' at line " + std::to_string(line_no));
        }
    }
    std::set<std::string> ids;
    for (const auto& [week, by_model] : weights)
        for (const auto& [model, w] : by_model) ids.insert(model);
    run.model_ids.assign(ids.begin(), ids.end());
    for (const auto& [week, by_model] : weights) {
        std::vector<double> w;
        for (const auto& id : run.model_ids) {
            auto it = by_model.find(id);
            if (it == by_model.end()) throw IoError(path + ": incomplete weights for week " + std::to_string(week));
            w.push_back(it->second);
        }
        run.weekly_weights.emplace(week, WeightVector(std::move(w)));
    }
    return run;
}

void write_weights_csv(const WeightVector& w, const std::vector<std::string>& model_ids,
                       const std::string& path) {
    if (w.size() != model_ids.size()) throw IoError("weights/model id count mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "model,weight\n";
    for (std::size_t m = 0; m < w.size(); ++m)
        out << model_ids[m] << "," << format_double(w[m]) << "\n";
}

void write_trace_csv(const FitTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "iteration,objective,converged\n";
    for (std::size_t i = 0; i < trace.objective_path.size(); ++i)
        out << (i + 1) << "," << format_double(trace.objective_path[i]) << ","
            << (trace.converged ? "true" : "false") << "\n";
}

}  // namespace stackcast
