#include "frtcd/io.hpp"

#include "frtcd/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <regex>
#include <sstream>

namespace frtcd {

namespace {

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// One CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) throw input_error(where + ": '" + s + "' is not a number");
    if (!std::isfinite(v)) throw input_error(where + ": outcome must be finite");
    return v;
}

// Shortest text that reads back to the same double.
std::string exact_number(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace

experiment_file parse_experiment_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        header = split_csv(line);
        break;
    }
    if (header.empty()) throw input_error(source + ": empty file");
    int c_id = -1, c_w = -1, c_y = -1, c_block = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = lower(header[i]);
        int* slot = h == "unit_id" ? &c_id : h == "w" ? &c_w : h == "y" ? &c_y : h == "block" ? &c_block : nullptr;
        if (!slot) throw input_error(source + ": unknown column '" + header[i] + "' (expected unit_id, w, y, block)");
        if (*slot >= 0) throw input_error(source + ": duplicate column '" + header[i] + "'");
        *slot = static_cast<int>(i);
    }
    if (c_id < 0 || c_w < 0 || c_y < 0) throw input_error(source + ": header needs unit_id, w and y columns");

    struct row {
        std::string id, block;
        std::uint8_t w;
        double y;
    };
    std::vector<row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (f.size() != header.size())
            throw input_error(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                              std::to_string(f.size()));
        row r;
        r.id = f[c_id];
        if (f[c_w] == "1")
            r.w = 1;
        else if (f[c_w] == "0")
            r.w = 0;
        else
            throw input_error(where + ": w must be 0 or 1, got '" + f[c_w] + "'");
        r.y = parse_double(f[c_y], where);
        if (c_block >= 0) {
            r.block = f[c_block];
            if (r.block.empty()) throw input_error(where + ": empty block label");
        }
        rows.push_back(std::move(r));
    }
    if (rows.size() < 2) throw input_error(source + ": need at least two units");

    experiment_file out;
    out.has_blocks = c_block >= 0;
    std::vector<std::size_t> order(rows.size());
    std::vector<block> blocks;
    if (out.has_blocks) {
        std::map<std::string, std::size_t> index;
        for (const auto& r : rows)
            if (index.try_emplace(r.block, out.block_names.size()).second) out.block_names.push_back(r.block);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return index[rows[a].block] < index[rows[b].block]; });
        blocks.assign(out.block_names.size(), block{});
        for (const auto& r : rows) {
            auto& b = blocks[index[r.block]];
            ++b.size;
            b.treated += r.w;
        }
    } else {
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    assignment w;
    std::vector<double> y;
    std::vector<std::string> ids;
    for (auto i : order) {
        w.push_back(rows[i].w);
        y.push_back(rows[i].y);
        ids.push_back(rows[i].id);
        if (out.has_blocks) out.block_of_unit.push_back(rows[i].block);
    }
    out.data = observed_data(std::move(w), std::move(y), std::move(ids));
    try {
        out.inferred = out.has_blocks ? design::randomized_block(blocks)
                                      : design::completely_randomized(rows.size(), std::count_if(rows.begin(), rows.end(), [](const row& r) { return r.w == 1; }));
    } catch (const input_error& e) {
        throw input_error(source + ": the assignment column does not describe a valid design (" + e.what() + ")");
    }
    return out;
}

experiment_file read_experiment_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    return parse_experiment_csv(in, path);
}

void write_experiment_csv(std::ostream& out, const experiment_file& file) {
    out << "unit_id,w,y" << (file.has_blocks ? ",block" : "") << "\n";
    const auto& d = file.data;
    for (std::size_t i = 0; i < d.n_units(); ++i) {
        out << csv_field(d.unit_ids.empty() ? std::to_string(i + 1) : d.unit_ids[i]) << ","
            << static_cast<int>(d.w_obs[i]) << "," << exact_number(d.y_obs[i]);
        if (file.has_blocks) out << "," << csv_field(file.block_of_unit[i]);
        out << "\n";
    }
}

design parse_design(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::smatch m;
    auto num = [&](const std::string& v) {
        try {
            return static_cast<std::size_t>(std::stoull(v));
        } catch (const std::exception&) {
            throw input_error("design '" + text + "': number out of range");
        }
    };
    if (std::regex_match(s, m, std::regex(R"(crd\((\d+),(\d+)\))")))
        return design::completely_randomized(num(m[1]), num(m[2]));
    if (std::regex_match(s, m, std::regex(R"(blocks\((\d+),(\d+)\))")))
        return design::balanced_blocks(num(m[1]), num(m[2]));
    if (std::regex_match(s, std::regex(R"(rbd\[\(\d+,\d+\)(,\(\d+,\d+\))*\])"))) {
        std::vector<block> blocks;
        const std::regex pair(R"(\((\d+),(\d+)\))");
        for (auto it = std::sregex_iterator(s.begin(), s.end(), pair); it != std::sregex_iterator(); ++it)
            blocks.push_back(block{num((*it)[1]), num((*it)[2])});
        return design::randomized_block(std::move(blocks));
    }
    throw input_error("cannot parse design '" + text + "' (expected CRD(N,N1), RBD[(k,t),...] or blocks(b,k))");
}

design resolve_design(const experiment_file& file, const std::optional<std::string>& declared) {
    if (!declared) return file.inferred;
    design d = parse_design(*declared);
    if (d.type() == design::kind::rbd && !file.has_blocks)
        throw input_error("design " + d.describe() + " is blocked but the file has no block column");
    if (d.type() == design::kind::crd && file.has_blocks)
        throw input_error("the file has a block column but design " + d.describe() + " is completely randomized");
    if (!(d == file.inferred))
        throw input_error("declared design " + d.describe() + " does not match the file, which implies " +
                          file.inferred.describe());
    return d;
}

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

nlohmann::json json_number(double x) {
    if (!std::isfinite(x)) return format_number(x);
    const double r = std::stod(format_number(x));
    return r == 0.0 ? 0.0 : r;  // no negative zero
}

double number_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw input_error("expected a number or \"inf\"/\"-inf\", got " + j.dump());
}

nlohmann::json to_json(const confidence_interval& ci) {
    return {{"lower", json_number(ci.lower)},
            {"upper", json_number(ci.upper)},
            {"alpha1", json_number(ci.alpha1)},
            {"alpha2", json_number(ci.alpha2)},
            {"method", to_string(ci.method)}};
}

nlohmann::json to_json(const pvalue_step_function& f) {
    nlohmann::json points = nlohmann::json::array(), values = nlohmann::json::array();
    for (double b : f.breakpoints()) points.push_back(json_number(b));
    for (std::size_t j = 0; j < f.n_segments(); ++j) values.push_back(json_number(f.segment_value(j)));
    return {{"side", to_string(f.side())},
            {"total", f.total()},
            {"base", f.base()},
            {"exhaustive", f.exhaustive()},
            {"breakpoints", points},
            {"values", values}};
}

nlohmann::json to_json(const scenario_result& r) {
    nlohmann::json arms = nlohmann::json::array();
    for (const auto& a : r.arms)
        arms.push_back({{"name", a.name},
                        {"reps", a.reps},
                        {"covered", a.covered},
                        {"coverage", json_number(a.coverage)},
                        {"width_mean", json_number(a.width_mean)},
                        {"width_sd", json_number(a.width_sd)},
                        {"unbounded", a.unbounded}});
    return {{"name", r.name}, {"mode1", r.mode1}, {"mode2", r.mode2}, {"arms", arms}};
}

nlohmann::json to_json(const scenario_config& c) {
    return {{"name", c.name},
            {"design1", c.design1.describe()},
            {"design2", c.design2.describe()},
            {"true_theta", json_number(c.true_theta)},
            {"reps", c.reps},
            {"k_cap", c.k_cap},
            {"alpha", json_number(c.alpha)},
            {"combiners", c.combiners},
            {"master_seed", c.master_seed},
            {"statistic", c.statistic},
            {"self_check_samples", c.self_check_samples}};
}

nlohmann::json to_json(const audit_report& r) {
    nlohmann::json laws = nlohmann::json::object();
    for (const auto& law : r.dominance.laws)
        laws[to_string(law.kind)] = {{"dominance_holds", law.dominance_holds()},
                                     {"max_discrepancy", json_number(law.max_discrepancy())},
                                     {"levels", law.level_counts.size()}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"alpha", json_number(row.alpha)},
                        {"total", row.total},
                        {"proposed_covered", row.proposed_covered},
                        {"traditional_covered", row.traditional_covered},
                        {"proposed_coverage", json_number(row.proposed_coverage)},
                        {"traditional_coverage", json_number(row.traditional_coverage)},
                        {"proposed_valid", row.proposed_valid}});
    return {{"theta0", json_number(r.theta0)},
            {"total", r.dominance.total},
            {"gamma_star", json_number(r.dominance.gamma_star)},
            {"dominance_ok", r.dominance_ok},
            {"gamma_bound_ok", r.gamma_bound_ok},
            {"laws", laws},
            {"coverage", rows}};
}

scenario_config scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw input_error("scenario config must be a JSON object");
    static const std::vector<std::string> known{"name",  "design1",   "design2",  "b1",          "k1",
                                                "b2",    "k2",        "true_theta", "reps",      "k_cap",
                                                "alpha", "combiners", "master_seed", "statistic", "self_check_samples"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw input_error("unknown scenario key '" + key + "'");
    scenario_config c;
    try {
        auto pick_design = [&](const char* dkey, const char* bkey, const char* kkey) {
            if (j.contains(dkey)) return parse_design(j.at(dkey).get<std::string>());
            if (j.contains(bkey) && j.contains(kkey))
                return design::balanced_blocks(j.at(bkey).get<std::size_t>(), j.at(kkey).get<std::size_t>());
            throw input_error(std::string("scenario needs ") + dkey + " or " + bkey + "/" + kkey);
        };
        c.design1 = pick_design("design1", "b1", "k1");
        c.design2 = pick_design("design2", "b2", "k2");
        if (j.contains("name")) c.name = j.at("name").get<std::string>();
        if (j.contains("true_theta")) c.true_theta = number_from_json(j.at("true_theta"));
        if (j.contains("reps")) c.reps = j.at("reps").get<std::size_t>();
        if (j.contains("k_cap")) c.k_cap = j.at("k_cap").get<std::uint64_t>();
        if (j.contains("alpha")) c.alpha = number_from_json(j.at("alpha"));
        if (j.contains("combiners")) c.combiners = j.at("combiners").get<std::vector<std::string>>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("statistic")) c.statistic = j.at("statistic").get<std::string>();
        if (j.contains("self_check_samples")) c.self_check_samples = j.at("self_check_samples").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("bad scenario config: ") + e.what());
    }
    return c;
}

scenario_config read_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace frtcd
