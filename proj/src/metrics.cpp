#include "aentd3/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "aentd3/errors.hpp"
#include "aentd3/numio.hpp"

namespace aentd3 {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

DoneReason done_reason_from_name(const std::string& name) {
    if (name == "running") return DoneReason::Running;
    if (name == "horizon_reached") return DoneReason::HorizonReached;
    if (name == "safety_termination") return DoneReason::SafetyTermination;
    throw ShapeError("unknown done_reason: " + name);
}

} // namespace

std::string MetricsFile::header_value(const std::string& key,
                                      const std::string& fallback) const {
    auto it = header.find(key);
    return it == header.end() ? fallback : it->second;
}

void write_metrics_csv(const std::string& path, const ExperimentConfig& cfg,
                       std::uint64_t seed, const std::string& kind,
                       const std::vector<MetricsRecord>& records) {
    const bool with_height = std::any_of(
        records.begin(), records.end(),
        [](const MetricsRecord& r) { return r.final_height.has_value(); });
    const bool with_mse = std::any_of(
        records.begin(), records.end(),
        [](const MetricsRecord& r) { return r.aen_mse.has_value(); });

    std::ostringstream out;
    for (const std::string& line : config_echo_lines(cfg))
        out << "# " << line << '\n';
    out << "# seed = " << format_u64(seed) << '\n';
    out << "# kind = " << kind << '\n';
    out << "seed,episode,return,episode_length,done_reason";
    if (with_height) out << ",final_height";
    if (with_mse) out << ",aen_mse";
    out << '\n';
    for (const MetricsRecord& r : records) {
        out << format_u64(r.seed) << ',' << format_u64(r.episode) << ','
            << format_double(r.episode_return) << ','
            << format_u64(r.episode_length) << ','
            << done_reason_name(r.done_reason);
        if (with_height)
            out << ','
                << (r.final_height ? format_double(*r.final_height)
                                   : std::string());
        if (with_mse)
            out << ','
                << (r.aen_mse ? format_double(*r.aen_mse) : std::string());
        out << '\n';
    }

    std::ofstream f(path);
    if (!f) throw IoError("cannot write metrics file: " + path);
    f << out.str();
    f.flush();
    if (!f) throw IoError("failed while writing metrics file: " + path);
}

MetricsFile read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read metrics file: " + path);

    MetricsFile file;
    file.path = path;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            const auto sep = body.find(" = ");
            if (sep != std::string::npos)
                file.header[body.substr(0, sep)] = body.substr(sep + 3);
            continue;
        }
        if (!have_columns) {
            file.columns = split_csv(line);
            have_columns = true;
            continue;
        }
        file.raw_rows.push_back(split_csv(line));
    }
    if (!have_columns)
        throw ShapeError("metrics file has no column row: " + path);
    file.kind = file.header_value("kind", "train");

    if (file.kind != "train" && file.kind != "eval") return file;

    auto column = [&file, &path](const std::string& name) -> std::ptrdiff_t {
        auto it = std::find(file.columns.begin(), file.columns.end(), name);
        if (it == file.columns.end())
            throw ShapeError("metrics file " + path + " lacks column " + name);
        return it - file.columns.begin();
    };
    const std::size_t c_seed = column("seed");
    const std::size_t c_episode = column("episode");
    const std::size_t c_return = column("return");
    const std::size_t c_length = column("episode_length");
    const std::size_t c_reason = column("done_reason");
    const auto h_it =
        std::find(file.columns.begin(), file.columns.end(), "final_height");
    const auto m_it =
        std::find(file.columns.begin(), file.columns.end(), "aen_mse");

    for (const std::vector<std::string>& row : file.raw_rows) {
        if (row.size() != file.columns.size())
            throw ShapeError("ragged row in metrics file: " + path);
        MetricsRecord r;
        r.seed = parse_u64(row[c_seed]);
        r.episode = parse_u64(row[c_episode]);
        r.episode_return = parse_double(row[c_return]);
        r.episode_length = parse_u64(row[c_length]);
        r.done_reason = done_reason_from_name(row[c_reason]);
        if (h_it != file.columns.end()) {
            const std::string& v = row[h_it - file.columns.begin()];
            if (!v.empty()) r.final_height = parse_double(v);
        }
        if (m_it != file.columns.end()) {
            const std::string& v = row[m_it - file.columns.begin()];
            if (!v.empty()) r.aen_mse = parse_double(v);
        }
        file.records.push_back(r);
    }
    return file;
}

} // namespace aentd3
