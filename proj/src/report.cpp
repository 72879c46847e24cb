#include "lowrank/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lowrank/errors.hpp"
#include "lowrank/text_io.hpp"

namespace lowrank {

namespace {

constexpr const char* kHeader = "method,trial,seed,ok,error,seconds,rank,note,atoms";

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

/// Splits one CSV record, honouring double-quoted fields (which may span lines).
bool next_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool quoted_field = false, any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted_field) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted_field = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted_field = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!any) return false;
    if (quoted_field) throw IoError("trials csv: unterminated quoted field");
    fields.push_back(std::move(field));
    return true;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
    T v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if constexpr (std::is_floating_point_v<T>) {
        if (s == "nan") return std::numeric_limits<T>::quiet_NaN();
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw IoError(std::string("trials csv: bad ") + what + " '" + s + "'");
    return v;
}

std::string atoms_field(const TrialResult& r) {
    std::string out;
    for (std::size_t i = 0; i < r.atoms.size(); ++i) {
        if (i) out += ';';
        const double c = i < r.coefficients.size() ? r.coefficients[i] : 0.0;
        out += format_double(r.atoms[i].modulus) + ':' + format_double(r.atoms[i].angle) + ':' +
               format_double(r.atoms[i].phase) + ':' + format_double(c);
    }
    return out;
}

void parse_atoms(const std::string& s, TrialResult& r) {
    if (s.empty()) return;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        double v[4];
        std::size_t start = 0;
        for (int k = 0; k < 4; ++k) {
            const std::size_t end = k < 3 ? item.find(':', start) : item.size();
            if (end == std::string::npos) throw IoError("trials csv: bad atom '" + item + "'");
            v[k] = parse_number<double>(item.substr(start, end - start), "atom");
            start = end + 1;
        }
        // Stored values are already canonical; keep them bit-exact.
        PoleAtom a;
        a.modulus = v[0];
        a.angle = v[1];
        a.phase = v[2];
        r.atoms.push_back(a);
        r.coefficients.push_back(v[3]);
    }
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
    out << kHeader << '\n';
    for (const TrialResult& r : trials) {
        out << quoted(r.method) << ',' << r.trial << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ','
            << format_double(r.error) << ',' << format_double(r.seconds) << ',' << r.rank << ','
            << quoted(r.note) << ',' << atoms_field(r) << '\n';
    }
    if (!out) throw IoError("trials csv: write failed");
}

std::vector<TrialResult> read_trials_csv(std::istream& in) {
    std::vector<std::string> f;
    if (!next_record(in, f)) throw IoError("trials csv: empty input");
    std::string header;
    for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
    if (header != kHeader) throw IoError("trials csv: unexpected header '" + header + "'");
    std::vector<TrialResult> out;
    while (next_record(in, f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 9) throw IoError("trials csv: expected 9 fields, got " + std::to_string(f.size()));
        TrialResult r;
        r.method = f[0];
        r.trial = parse_number<int>(f[1], "trial");
        r.seed = parse_number<std::uint64_t>(f[2], "seed");
        r.ok = parse_number<int>(f[3], "ok") != 0;
        r.error = parse_number<double>(f[4], "error");
        r.seconds = parse_number<double>(f[5], "seconds");
        r.rank = parse_number<int>(f[6], "rank");
        r.note = f[7];
        parse_atoms(f[8], r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string summary_json(const Summary& s) {
    nlohmann::json j;
    j["experiment"] = s.experiment;
    j["seed"] = s.seed;
    j["trials"] = s.trials;
    j["methods"] = nlohmann::json::array();
    for (const MethodSummary& m : s.methods) {
        j["methods"].push_back({{"method", m.method},
                                {"trials", m.trials},
                                {"failed", m.failed},
                                {"median", number_or_null(m.median)},
                                {"q1", number_or_null(m.q1)},
                                {"q3", number_or_null(m.q3)},
                                {"mean_seconds", m.mean_seconds}});
    }
    j["reductions"] = nlohmann::json::array();
    for (const Reduction& r : s.reductions) {
        j["reductions"].push_back(
            {{"method", r.method}, {"baseline", r.baseline}, {"reduction", number_or_null(r.value)}});
    }
    j["poles"] = nlohmann::json::array();
    for (const PoleStats& p : s.poles) {
        j["poles"].push_back({{"true_modulus", p.truth.modulus},
                              {"true_angle", p.truth.angle},
                              {"true_phase", p.truth.phase},
                              {"matched", p.matched},
                              {"modulus_mean", p.modulus_mean},
                              {"modulus_std", p.modulus_std},
                              {"angle_mean", p.angle_mean},
                              {"angle_std", p.angle_std},
                              {"phase_mean", p.phase_mean},
                              {"phase_std", p.phase_std}});
    }
    return j.dump(2);
}

std::string summary_table(const Summary& s) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "experiment %s, %d trials, seed %llu\n", s.experiment.c_str(), s.trials,
                  static_cast<unsigned long long>(s.seed));
    out += line;
    std::snprintf(line, sizeof line, "%-10s %7s %7s %12s %12s %12s %10s\n", "method", "trials", "failed", "median",
                  "q1", "q3", "mean_s");
    out += line;
    for (const MethodSummary& m : s.methods) {
        std::snprintf(line, sizeof line, "%-10s %7d %7d %12.4e %12.4e %12.4e %10.4f\n", m.method.c_str(), m.trials,
                      m.failed, m.median, m.q1, m.q3, m.mean_seconds);
        out += line;
    }
    if (!s.reductions.empty()) {
        out += "median error reduction (1 - method/baseline):\n";
        for (const Reduction& r : s.reductions) {
            std::snprintf(line, sizeof line, "  %-8s vs %-8s %7.1f%%\n", r.method.c_str(), r.baseline.c_str(),
                          100.0 * r.value);
            out += line;
        }
    }
    if (!s.poles.empty()) {
        out += "recovered poles (lar): true |z|, theta, psi -> mean (std)\n";
        for (const PoleStats& p : s.poles) {
            std::snprintf(line, sizeof line,
                          "  %.3f %.3f %+.3f -> |z| %.3f (%.3f)  theta %.3f (%.3f)  psi %+.3f (%.3f)  n=%d\n",
                          p.truth.modulus, p.truth.angle, p.truth.phase, p.modulus_mean, p.modulus_std, p.angle_mean,
                          p.angle_std, p.phase_mean, p.phase_std, p.matched);
            out += line;
        }
    }
    return out;
}

void write_report(const std::string& dir, const MonteCarloResult& result) {
    if (result.trials.empty()) throw ArgumentError("write_report: no trial results");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
    const auto open = [&](const char* name) {
        const std::string path = (std::filesystem::path(dir) / name).string();
        std::ofstream f(path);
        if (!f) throw IoError("cannot write '" + path + "'");
        return f;
    };
    {
        auto f = open("trials.csv");
        write_trials_csv(f, result.trials);
    }
    {
        auto f = open("summary.json");
        f << summary_json(result.summary) << '\n';
        if (!f) throw IoError("summary.json: write failed");
    }
    {
        auto f = open("summary.txt");
        f << summary_table(result.summary);
        if (!f) throw IoError("summary.txt: write failed");
    }
}

}  // namespace lowrank
