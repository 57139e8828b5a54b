#include "pinch/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "pinch/errors.hpp"

namespace pinch::io {

namespace {

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

// Data rows of a CSV whose first line must equal `header`.
std::vector<std::vector<std::string>> rows(const std::string& text, const std::string& header)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw CorruptArtifact("CSV header mismatch: expected '" + header + "'");
    }
    const auto width = split_line(header).size();
    std::vector<std::vector<std::string>> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        auto fields = split_line(line);
        if (fields.size() != width) {
            throw CorruptArtifact("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                                  " fields");
        }
        out.push_back(std::move(fields));
    }
    return out;
}

template <typename T>
T parse_uint(const std::string& s)
{
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw CorruptArtifact("not an integer: '" + s + "'");
    }
    return v;
}

std::string join(std::initializer_list<std::string> fields)
{
    std::string out;
    for (const auto& f : fields) {
        if (!out.empty()) {
            out += ',';
        }
        out += f;
    }
    out += '\n';
    return out;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

double parse_double(const std::string& text)
{
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw CorruptArtifact("not a number: '" + text + "'");
    }
    return v;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dataset_csv(const nn::Dataset& data)
{
    std::string out = std::string(dataset_header) + "\n";
    for (const auto& s : data.samples) {
        for (std::size_t k = 0; k < s.gains.size(); ++k) {
            out += join({std::to_string(s.id), std::to_string(k), format_double(s.gains[k].real()),
                         format_double(s.gains[k].imag()), format_double(s.target_q[k]),
                         format_double(s.total_power_w), format_double(s.noise_power_w),
                         std::to_string(s.antennas), std::to_string(s.gains.size())});
        }
    }
    return out;
}

nn::Dataset parse_dataset_csv(const std::string& text)
{
    nn::Dataset data;
    for (const auto& f : rows(text, dataset_header)) {
        const auto id = parse_uint<std::uint64_t>(f[0]);
        const auto k = parse_uint<std::size_t>(f[1]);
        const auto users = parse_uint<std::size_t>(f[8]);
        if (k == 0) {
            nn::Sample s;
            s.id = id;
            s.total_power_w = parse_double(f[5]);
            s.noise_power_w = parse_double(f[6]);
            s.antennas = parse_uint<std::size_t>(f[7]);
            s.gains.reserve(users);
            data.samples.push_back(std::move(s));
        }
        if (data.samples.empty() || data.samples.back().id != id || data.samples.back().gains.size() != k) {
            throw CorruptArtifact("dataset CSV: rows of sample " + std::to_string(id) + " out of order");
        }
        auto& s = data.samples.back();
        s.gains.emplace_back(parse_double(f[2]), parse_double(f[3]));
        s.target_q.push_back(parse_double(f[4]));
    }
    const auto users = data.users();
    for (const auto& s : data.samples) {
        if (s.gains.size() != users) {
            throw CorruptArtifact("dataset CSV: sample " + std::to_string(s.id) + " has a different K");
        }
    }
    return data;
}

std::string results_csv(const mc::ExperimentResult& result, bool timing)
{
    std::string out = std::string(results_header) + "\n";
    const std::string var(mc::sweep_name(result.sweep_var));
    for (const auto& r : result.records) {
        out += join({std::string(mc::scheme_name(r.scheme)), var, format_double(r.sweep_value),
                     std::to_string(r.trial), std::to_string(r.seed), format_double(r.sum_rate),
                     format_double(r.min_rate), r.outage ? "1" : "0", format_double(timing ? r.wall_ms : 0.0)});
    }
    return out;
}

std::vector<ResultRow> parse_results_csv(const std::string& text)
{
    std::vector<ResultRow> out;
    for (const auto& f : rows(text, results_header)) {
        ResultRow r;
        r.scheme = f[0];
        r.sweep_var = f[1];
        r.sweep_value = parse_double(f[2]);
        r.trial = parse_uint<std::size_t>(f[3]);
        r.seed = parse_uint<std::uint64_t>(f[4]);
        r.sum_rate = parse_double(f[5]);
        r.min_rate = parse_double(f[6]);
        r.outage = parse_uint<int>(f[7]) != 0;
        r.wall_ms = parse_double(f[8]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string curves_csv(const nn::TrainResult& result)
{
    std::string out = "fold,epoch,train_mae,val_mae\n";
    for (std::size_t f = 0; f < result.folds.size(); ++f) {
        const auto& c = result.folds[f];
        for (std::size_t e = 0; e < c.val_mae.size(); ++e) {
            out += join({std::to_string(f), std::to_string(e + 1), format_double(c.train_mae[e]),
                         format_double(c.val_mae[e])});
        }
    }
    return out;
}

std::string summary_json(const mc::ExperimentResult& result)
{
    using nlohmann::ordered_json;
    // (scheme, sweep index) in first-seen order.
    std::map<std::pair<std::size_t, mc::Scheme>, std::vector<const mc::MetricsRecord*>> groups;
    for (const auto& r : result.records) {
        groups[{r.sweep_index, r.scheme}].push_back(&r);
    }
    ordered_json cells = ordered_json::array();
    for (const auto& [key, recs] : groups) {
        const double n = static_cast<double>(recs.size());
        std::vector<double> sr;
        double mean = 0.0, min_rate = 0.0, outage = 0.0;
        for (const auto* r : recs) {
            sr.push_back(r->sum_rate);
            mean += r->sum_rate;
            min_rate += r->min_rate;
            outage += r->outage ? 1.0 : 0.0;
        }
        mean /= n;
        double var = 0.0;
        for (double v : sr) {
            var += (v - mean) * (v - mean);
        }
        const double sd = recs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        const double half = 1.96 * sd / std::sqrt(n);
        const auto box = mc::boxplot_stats(sr);
        cells.push_back({
            {"scheme", std::string(mc::scheme_name(key.second))},
            {"sweep_value", recs.front()->sweep_value},
            {"trials", recs.size()},
            {"mean_sum_rate_bpshz", mean},
            {"std_sum_rate_bpshz", sd},
            {"ci95_lo", mean - half},
            {"ci95_hi", mean + half},
            {"mean_min_rate_bpshz", min_rate / n},
            {"outage_probability", outage / n},
            {"boxplot",
             {{"median", box.median},
              {"q1", box.q1},
              {"q3", box.q3},
              {"iqr", box.iqr},
              {"whisker_lo", box.whisker_lo},
              {"whisker_hi", box.whisker_hi},
              {"outliers", box.outliers}}},
        });
    }
    ordered_json failures = ordered_json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"sweep_index", f.sweep_index}, {"trial", f.trial}, {"seed", f.seed},
                            {"message", f.message}});
    }
    ordered_json doc = {
        {"sweep_var", std::string(mc::sweep_name(result.sweep_var))},
        {"cells", cells},
        {"failures", failures},
    };
    return doc.dump(2) + "\n";
}

std::vector<cplx> parse_gains_csv(const std::string& text)
{
    std::vector<cplx> gains;
    for (const auto& f : rows(text, "re_g,im_g")) {
        gains.emplace_back(parse_double(f[0]), parse_double(f[1]));
    }
    return gains;
}

} // namespace pinch::io
